# Copyright 2018 Amazon.com, Inc. or its affiliates. All Rights Reserved.

# Licensed under the Apache License, Version 2.0 (the "License").
# You may not use this file except in compliance with the License.
# A copy of the License is located at

# http://www.apache.org/licenses/LICENSE-2.0

# or in the "license" file accompanying this file. This file is distributed
# on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either
# express or implied. See the License for the specific language governing
# permissions and limitations under the License.

"""Utility methods for cascademf: artifact storage, run paths and worker counts"""
import os
from datetime import datetime, timezone
from pathlib import Path
from urllib.parse import urlparse

import boto3

THREADS_ENVIRONMENT_VARIABLE = 'CASCADEMF_THREADS'


def worker_count():
    """Parallelism cap from CASCADEMF_THREADS, defaulting to the CPU count"""
    configured = os.environ.get(THREADS_ENVIRONMENT_VARIABLE)
    if configured:
        return max(1, int(configured))
    return os.cpu_count() or 1


def build_run_path(base_location, partition_values):
    """Join `base_location` with hive-style `name=value` parts, e.g. <out>/scenario=bell/seed=42"""
    parts = ['='.join((name, str(value))) for name, value in partition_values]
    return '/'.join([base_location.rstrip('/')] + parts)


def run_stamp(now=None):
    """UTC stamp naming a unique run sub-directory"""
    now = now or datetime.now(timezone.utc)
    return now.strftime('%Y%m%dT%H%M%S%fZ')


def is_s3_uri(location):
    return urlparse(location).scheme == 's3'


class S3Writer:
    """Utility class to write artifacts to S3

    Provide an S3 URI (s3://<bucket>/<prefix>) to initialize. All objects are written below the
    provided prefix.
    """
    def __init__(self, s3_uri):
        self.s3_client = boto3.client("s3")
        self.s3_uri = s3_uri

        s3_url = urlparse(s3_uri)
        self.s3_bucket = s3_url.netloc
        self.s3_path = self._strip_slashes(s3_url.path)

    def write(self, relative_name, payload):
        """Put `payload` bytes under the prefix and return the object URI"""
        key = '/'.join(part for part in [self.s3_path, self._strip_slashes(relative_name)] if part)
        self.s3_client.put_object(Bucket=self.s3_bucket, Key=key, Body=payload)
        return "s3://%s/%s" % (self.s3_bucket, key)

    def _strip_slashes(self, value):
        return value.lstrip('/').rstrip('/')


class LocalWriter:
    """Same interface as S3Writer, backed by a local directory"""
    def __init__(self, directory):
        self.directory = Path(directory)

    def write(self, relative_name, payload):
        target = self.directory / relative_name
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_bytes(payload)
        return str(target)


def artifact_writer(location):
    """An S3Writer for s3:// locations, a LocalWriter otherwise"""
    if is_s3_uri(location):
        return S3Writer(location)
    return LocalWriter(location)
