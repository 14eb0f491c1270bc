# pylint: skip-file
from datetime import datetime, timezone

from utils import S3Stubber

from cascademf.utils import (LocalWriter, S3Writer, THREADS_ENVIRONMENT_VARIABLE, artifact_writer,
                             build_run_path, is_s3_uri, run_stamp, worker_count)


def test_build_run_path():
    path = build_run_path('s3://bucket/runs/', [('scenario', 'bell'), ('seed', 42)])
    assert path == 's3://bucket/runs/scenario=bell/seed=42'
    assert build_run_path('runs', []) == 'runs'


def test_run_stamp():
    now = datetime(2024, 3, 5, 7, 8, 9, 123456, tzinfo=timezone.utc)
    assert run_stamp(now) == '20240305T070809123456Z'


def test_worker_count(monkeypatch):
    monkeypatch.setenv(THREADS_ENVIRONMENT_VARIABLE, '3')
    assert worker_count() == 3
    monkeypatch.setenv(THREADS_ENVIRONMENT_VARIABLE, '0')
    assert worker_count() == 1
    monkeypatch.delenv(THREADS_ENVIRONMENT_VARIABLE)
    assert worker_count() >= 1


def test_s3_writer(mocker):
    stub = S3Stubber.for_single_request('put_object', {
        'Bucket': 'bucket',
        'Key': 'prefix/scenario=bell/report.json',
        'Body': b'{}',
    })
    mocker.patch('cascademf.utils.boto3.client', return_value=stub.client)

    writer = S3Writer('s3://bucket/prefix/')
    with stub.stubber:
        uri = writer.write('/scenario=bell/report.json', b'{}')
    assert uri == 's3://bucket/prefix/scenario=bell/report.json'
    stub.stubber.assert_no_pending_responses()


def test_s3_writer_bucket_root(mocker):
    stub = S3Stubber.for_multiple_requests('put_object', [
        {'Bucket': 'bucket', 'Key': 'report.json', 'Body': b'{}'},
        {'Bucket': 'bucket', 'Key': 'manifest.json', 'Body': b'[]'},
    ])
    mocker.patch('cascademf.utils.boto3.client', return_value=stub.client)

    writer = S3Writer('s3://bucket')
    with stub.stubber:
        assert writer.write('report.json', b'{}') == 's3://bucket/report.json'
        assert writer.write('manifest.json', b'[]') == 's3://bucket/manifest.json'
    stub.stubber.assert_no_pending_responses()


def test_local_writer(tmp_path):
    writer = LocalWriter(tmp_path / 'runs')
    target = writer.write('scenario=bell/report.json', b'{"a": 1}')
    assert (tmp_path / 'runs' / 'scenario=bell' / 'report.json').read_bytes() == b'{"a": 1}'
    assert target.endswith('report.json')


def test_artifact_writer(mocker, tmp_path):
    mocker.patch('cascademf.utils.boto3.client')
    assert is_s3_uri('s3://bucket/key')
    assert not is_s3_uri(str(tmp_path))
    assert isinstance(artifact_writer('s3://bucket/key'), S3Writer)
    assert isinstance(artifact_writer(str(tmp_path)), LocalWriter)
