"""
Stieltjes Calculus Application
"""
