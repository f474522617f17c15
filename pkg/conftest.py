"""Puts the repository root on sys.path so ``src`` imports resolve under pytest."""
