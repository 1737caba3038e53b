# JSON schemas for bundle descriptors, link steps, canonical polynomials and transition matrices
