# three-phase controller
state red
state green
state yellow
edge red green
edge green yellow
edge yellow red
label go green yellow
