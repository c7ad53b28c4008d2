"""
Core package: GF(2) algebra, code construction, codec and result records.
"""
__version__ = "0.1.0"
