"""Shipped register map, configs, programs, faults and stimulus."""
