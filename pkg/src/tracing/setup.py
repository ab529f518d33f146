"""
Tracing setup for convergence studies.

A study run is one trace: the study span is the root, each refinement level
a child, and assembly / elimination / CG solves nest below it. Spans go to
Arize Cloud when credentials are configured and stay in-process otherwise.
"""

import os
from dotenv import load_dotenv

from opentelemetry import trace

load_dotenv(override=True)

DEFAULT_SERVICE_NAME = "interface-fem"

_initialized = False


def _local_provider(service_name: str, project_name: str):
    from opentelemetry.sdk.trace import TracerProvider
    from opentelemetry.sdk.resources import Resource

    provider = TracerProvider(
        resource=Resource.create({
            "service.name": service_name,
            "arize.project.name": project_name,
        })
    )
    trace.set_tracer_provider(provider)


def setup_tracing(service_name: str = None) -> trace.Tracer:
    """Configure tracing once per process and return a tracer."""
    global _initialized

    service_name = service_name or os.environ.get("FEMSTUDY_SERVICE_NAME", DEFAULT_SERVICE_NAME)
    if _initialized:
        return trace.get_tracer(service_name)

    arize_api_key = os.environ.get("ARIZE_API_KEY")
    arize_space_id = os.environ.get("ARIZE_SPACE_ID")
    project_name = os.environ.get("ARIZE_PROJECT_NAME", "interface-fem-studies")

    if not arize_api_key or not arize_space_id:
        print(f"Warning: Arize credentials not set for {service_name}, tracing locally")
        _local_provider(service_name, project_name)
    else:
        try:
            from arize.otel import register
            register(
                space_id=arize_space_id,
                api_key=arize_api_key,
                project_name=project_name,
                set_global_tracer_provider=True,
                batch=True,
                verbose=False,
            )
        except ImportError:
            print(f"Warning: arize-otel not available for {service_name}, tracing locally")
            _local_provider(service_name, project_name)

    _initialized = True
    print(f"Tracing: {service_name}")

    return trace.get_tracer(service_name)


def trace_id_of(span) -> str:
    """Hex trace id of a span, empty when the span is not recording."""
    ctx = span.get_span_context()
    return format(ctx.trace_id, '032x') if ctx.is_valid else ""
