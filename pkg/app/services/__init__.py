# Domain services: sequences, weights, Lusky numbers, hull/core and disk statistics
