"""Structural resource lambda-calculus: typed terms, morphism actions and labelled rewriting."""
