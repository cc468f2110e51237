# parity abstraction of a counter
state even
state odd
edge even odd
edge odd even
