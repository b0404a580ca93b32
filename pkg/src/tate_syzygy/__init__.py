"""Eventual periodicity, Gorenstein properties and (Tate-)Hochschild cohomology
of finite-dimensional quiver algebras, computed with exact linear algebra."""

__version__ = "0.1.0"
