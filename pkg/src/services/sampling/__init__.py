"""
Gibbs sampling engines for the relational models
"""
