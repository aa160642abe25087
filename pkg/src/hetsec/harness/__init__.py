"""Experiment configuration, Monte-Carlo drivers, outputs and the command line."""
