from setuptools import find_packages, setup

setup(
    name="xrcache",
    version="0.3.0",
    description="Location-dependent coded caching simulator for multi-antenna wireless XR",
    packages=find_packages(exclude=("tests", "tests.*", "examples", "examples.*")),
    python_requires=">=3.10",
    install_requires=[
        "numpy>=2.0",
        "cvxpy>=1.5",
        "pydantic>=2.6",
        "PyYAML>=6.0",
        "click>=8.1",
        "rich>=13.0",
        "tenacity>=8.2",
        "tomli>=2.0; python_version < '3.11'",
    ],
    extras_require={"test": ["pytest>=8.0"]},
    entry_points={"console_scripts": ["xrcache=xrcache:main"]},
)
