#!/usr/bin/env python3
"""
setup.py for the symtrunc package
"""

from setuptools import setup, find_packages

# Package metadata
PACKAGE_NAME = "symtrunc"
VERSION = "0.1.0"


# Read requirements from requirements.txt
def read_requirements():
    """Read requirements from requirements.txt file."""
    requirements = []
    try:
        with open('requirements.txt', 'r', encoding='utf-8') as f:
            for line in f:
                line = line.split('#', 1)[0].strip()
                if line and not line.startswith('-'):
                    requirements.append(line)
    except FileNotFoundError:
        print("Warning: requirements.txt not found, using minimal requirements")
        requirements = [
            "numpy>=1.20.0,<2.0.0",
            "pandas>=1.3.0",
            "scipy>=1.7.0",
            "pyyaml>=6.0",
            "tqdm>=4.60.0",
            "psutil",
        ]
    return requirements


# Read long description from README
def read_long_description():
    """Read long description from README file."""
    try:
        with open('README.md', 'r', encoding='utf-8') as f:
            return f.read()
    except FileNotFoundError:
        return (
            "Rearrangements, truncations and symmetrization inequalities: a rearrangement calculus, "
            "the Hardy operator, majorization certificates and Sobolev-Poincare verification harnesses."
        )


DEV_REQUIREMENTS = [
    "pytest>=6.0.0",
    "pytest-cov>=2.0.0",
    "hypothesis>=6.0.0",
    "black>=21.0.0",
    "flake8>=3.8.0",
    "mypy>=0.800",
]

DOCS_REQUIREMENTS = [
    "sphinx>=4.0.0",
    "sphinx-rtd-theme>=1.0.0",
]

SETUP_CONFIG = {
    "name": PACKAGE_NAME,
    "version": VERSION,
    "packages": find_packages(exclude=["tests", "tests.*", "examples", "examples.*"]),
    "install_requires": read_requirements(),
    "extras_require": {
        "dev": DEV_REQUIREMENTS,
        "docs": DOCS_REQUIREMENTS,
        "all": DEV_REQUIREMENTS + DOCS_REQUIREMENTS,
    },
    "entry_points": {
        "console_scripts": [
            "symtrunc=symtrunc.cli:main",
        ],
    },
    "description": "Rearrangements, truncations and symmetrization inequalities for Sobolev-Poincare estimates",
    "long_description": read_long_description(),
    "long_description_content_type": "text/markdown",
    "keywords": "rearrangement, Sobolev-Poincare, Hardy operator, Lorentz spaces, symmetrization, John domains",
    "classifiers": [
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "Topic :: Scientific/Engineering :: Mathematics",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Programming Language :: Python :: 3.12",
        "Operating System :: OS Independent",
    ],
    "python_requires": ">=3.8",
}

if __name__ == "__main__":
    setup(**SETUP_CONFIG)
