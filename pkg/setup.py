# Copyright (c) 2019-present, The Unisum Authors. All Rights Reserved.
# Use of this source code is governed by a BSD-3-clause license that can
# be found in the LICENSE file. See the AUTHORS file for names of contributors.
import setuptools

with open("README.md", "r") as fh:
    long_description = fh.read()

setuptools.setup(
    name="unisum",
    description="Unisum, bounded verification of universal sums of polygonal numbers",
    long_description=long_description,
    long_description_content_type="text/markdown",
    license="BSD-3-Clause",
    include_package_data=True,
    packages=setuptools.find_packages(exclude=["tests", "tests.*"]),
    package_data={"unisum": ["fixtures/*.yml"]},
    entry_points={"console_scripts": ["unisum = unisum.unisum_main:run"]},
    classifiers=[
        "Development Status :: 3 - Alpha",
        "License :: OSI Approved :: BSD License",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3 :: Only",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    python_requires=">=3.8, <4",
    install_requires=[
        "logzero>=1.5,<2.0",
        "marshmallow>=3.7,<4.0",
        "marshmallow_enum>=1.5.0,<2.0",
        "natsort>=6.0.0,<9.0",
        "numpy>=1.19,<2.0",
        "psutil>=5.6,<6.0",
        "pydantic>=1.6,<2.0",
        "python-dotenv>=0.10.1,<1.0",
        "ruamel.yaml>0.15.0,<0.18",
        "setuptools",  # pkg_resources
        "sympy>=1.6,<2.0",
    ],
    extras_require={"test": ["pytest>=6.0"]},
)
