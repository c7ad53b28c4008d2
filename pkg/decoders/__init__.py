"""
Decoders package: float and fixed-point message passing on a Tanner graph.
"""
