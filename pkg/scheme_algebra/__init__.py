"""Exact linear algebra, Hamming scheme matrices and Terwilliger algebra decompositions."""
