# Exact computations with P1-bundles over Hirzebruch surfaces and the projective plane
