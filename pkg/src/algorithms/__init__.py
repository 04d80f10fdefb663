# Numerical algorithms
