# Weight-sequence toolkit: services, CLI and HTTP layer
