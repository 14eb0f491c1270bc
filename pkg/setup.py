# Copyright 2018 Amazon.com, Inc. or its affiliates. All Rights Reserved.

# Licensed under the Apache License, Version 2.0 (the "License").
# You may not use this file except in compliance with the License.
# A copy of the License is located at

# http://www.apache.org/licenses/LICENSE-2.0

# or in the "license" file accompanying this file. This file is distributed
# on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either
# express or implied. See the License for the specific language governing
# permissions and limitations under the License.

"""Installs the cascademf package and its console entry point"""
from setuptools import find_packages, setup

setup(
    name='cascademf',
    version='1.0.0',
    packages=find_packages(exclude=['test', 'test.*']),
    install_requires=['numpy>=1.22', 'scipy>=1.9', 'boto3>=1.9.226'],
    entry_points={'console_scripts': ['cascademf=cascademf.cli:main']},
)
