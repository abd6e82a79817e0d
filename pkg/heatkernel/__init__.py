"""
heatkernel - rational pricing models from weighted heat kernels on Lévy random bridges
"""
__version__ = "0.1.0"
