"""Repeated generalized Bell-state measurement teleportation over a non-maximally entangled resource."""
