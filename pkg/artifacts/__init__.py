"""
Artifacts package: on-disk code, matrix and weight files.
"""
