# DualGraphLens: graph equivalence, blow-ups and valuations
