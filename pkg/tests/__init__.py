# Tests package for p1bundles
