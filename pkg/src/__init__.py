# Mathieu functions and strip-plane Casimir energies
