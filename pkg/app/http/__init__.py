# HTTP layer: controllers (routers), requests (schemas)
