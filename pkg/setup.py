#!/usr/bin/env python
from setuptools import setup

project_name = "bellnoise"

setup(
    name=project_name,
    version="0.0.1alpha",
    packages=[project_name],
    install_requires=["numpy", "scipy", "xarray", "pandas"],
    entry_points={"console_scripts": [f"{project_name}={project_name}.cli:main"]}
)
