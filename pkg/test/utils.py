# pylint: skip-file
import boto3
from botocore.stub import Stubber


class S3Stubber:
    def __init__(self, for_method):
        self.client = boto3.client("s3", region_name="us-east-1")
        self.stubber = Stubber(self.client)
        self.method_name = for_method

    @classmethod
    def for_single_request(cls, method_name, request_params, response=None):
        stub = cls(method_name)
        stub.add_response(response or {'ETag': '"etag"'}, request_params)
        return stub

    @classmethod
    def for_multiple_requests(cls, method_name, request_params_list):
        stub = cls(method_name)

        for req in request_params_list:
            stub.add_response({'ETag': '"etag"'}, req)
        return stub

    def add_response(self, response_body, request_params):
        self.stubber.add_response(self.method_name, response_body, request_params)
