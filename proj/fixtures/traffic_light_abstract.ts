# quotient by {green, yellow} -> go
state red
state go
edge red go
edge go go
edge go red
label moving go
