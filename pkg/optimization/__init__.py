"""Linear programs and the local degree-distribution optimizer."""
