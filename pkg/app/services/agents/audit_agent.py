"""
    Audit agent: checks the report payload contract during scenarios
"""
import logging
from pathlib import Path

from app.model.router.event import AgentId, DeliveryMode, Event
from app.model.runtime_constants import AgentNames, EventTypes
from app.services.message_router import MessageRouter

REPORT_KEYS = frozenset({"path", "caption"})


class AuditAgent:
    """
        A report must carry exactly path and caption, and path must be the
        image of a snapshot published earlier in the run
    """

    agent_id : AgentId

    def __init__(self, router : MessageRouter) -> None:
        self.router = router
        self.snapshot_paths : set[Path] = set()

    def attach(self) -> None:
        self.agent_id = self.router.register_agent(AgentNames.AUDIT, self.handle_event)
        self.router.subscribe(self.agent_id, EventTypes.SNAPSHOT, DeliveryMode.INLINE)
        self.router.subscribe(self.agent_id, EventTypes.REPORT, DeliveryMode.INLINE)

    def handle_event(self, event : Event) -> None:
        if event.event_type == EventTypes.SNAPSHOT:
            self.snapshot_paths.add(Path(event.payload["path"]))
            return

        problem = self.check_report(event)
        if problem is not None:
            self.router.metrics.increment("audit.report_contract_violations")
            logging.error("Report seq %s breaks the payload contract: %s", event.seq, problem)

    def check_report(self, event : Event) -> str | None:
        keys = frozenset(event.payload)
        if keys != REPORT_KEYS:
            return f"keys {sorted(keys)}"
        path = event.payload["path"]
        if not isinstance(path, Path) or path not in self.snapshot_paths:
            return f"{path} is not a published snapshot"
        if not isinstance(event.payload["caption"], str) or event.payload["caption"].strip() == "":
            return "empty caption"
        return None
