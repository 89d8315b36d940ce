#!/usr/bin/env python3
from setuptools import setup, find_packages


setup(
    name="curvlie",
    description="Curvature, SNC test and classification of low-dimensional metric Lie algebras",
    packages=find_packages(exclude=["tests"]),
    install_requires=["katsdpservices", "numpy", "scipy"],
    scripts=["scripts/lie_curvature.py"],
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "Operating System :: OS Independent",
        "Programming Language :: Python :: 3",
        "Topic :: Scientific/Engineering :: Mathematics"],
    platforms=["OS Independent"],
    keywords="lie algebra curvature solvmanifold",
    python_requires=">=3.8",
    zip_safe=False,
    use_katversion=True,
    test_suite="tests",
    extras_require={
        'test': [
            "pytest",
            "pytest-cov",
        ]
    }
)
