"""
    Holds the defaults for the agent runtime
"""

VERSION : str = "0.1.0"


class EventTypes:
    """
        The fixed set of event types the router accepts
    """

    COMMAND : str = "command"
    STATUS : str = "status"
    SNAPSHOT : str = "snapshot"
    REPORT : str = "report"
    SHUTDOWN : str = "shutdown"

    ALL : tuple[str, ...] = (COMMAND, STATUS, SNAPSHOT, REPORT, SHUTDOWN)


class AgentNames:
    """
        Names the runtime registers its agents under
    """

    ROUTER : str = "router"
    VISION : str = "vision"
    REPORTING : str = "reporting"
    COMMUNICATION : str = "communication"
    CONTROL : str = "control"
    AUDIT : str = "audit"


class RuntimeConstants:
    """
        Default values for the router, tracker, reporting and harness
    """

    ROUTER_QUEUE_CAPACITY : int = 1024
    BACKGROUND_QUEUE_CAPACITY : int = 16
    INLINE_BUDGET_S : float = 0.05

    TRACKER_THETA : float = 0.3
    TRACKER_L_MAX : int = 10
    TRACKER_DWELL_S : float = 5.0
    TRACKER_COOLDOWN_S : float = 30.0
    TRACKER_CONFIDENCE : float = 0.25
    TRACKER_TARGET_LABELS : tuple[str, ...] = ("person",)

    FRAME_RATE : float = 10.0
    RESOLUTION : tuple[int, int] = (640, 480)

    LLM_BASE_URL : str = "http://127.0.0.1:11434"
    LLM_GENERATE_URL : str = "/api/generate"
    LLM_MODEL : str = "llama3.2:1b"
    REPORT_DEADLINE_S : float = 60.0
    REPORT_MAX_IN_FLIGHT : int = 1
    REPORT_QUEUE_CAP : int = 4
    PROMPT_CAP : int = 2000
    LLM_RETRY_BACKOFF_S : float = 1.0
    LLM_READ_CHUNK : int = 4096

    STATUS_INTERVAL_S : float = 10.0
    RECONNECT_MIN_S : float = 1.0
    RECONNECT_MAX_S : float = 60.0

    SNAPSHOT_DIR : str = "snapshots"
    METRICS_OUT : str = "metrics.txt"

    # Frame timestamps are k / frame_rate, differences may carry rounding error
    TIME_EPSILON : float = 1e-6


class EnvironmentVariables:
    """
        Environment variables read by the runtime
    """

    BOT_TOKEN : str = "CHANNEL_BOT_TOKEN"
    APP_TOKEN : str = "CHANNEL_APP_TOKEN"
    LLM_BASE_URL : str = "LLM_BASE_URL"
