"""Monte Carlo simulation of peeling decoding on sampled Tanner graphs."""
