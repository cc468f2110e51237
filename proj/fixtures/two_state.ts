# minimal two-state system: 1 loops, 1 -> 2, 2 loops
state 1
state 2
edge 1 1
edge 1 2
edge 2 2
label p 1
label q 2
