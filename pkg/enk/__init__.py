"""EnK time-encoding convolution - library package"""

__version__ = "1.0.0"
__author__ = "EnK Team"
