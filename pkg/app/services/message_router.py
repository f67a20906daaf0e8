"""
    In-process publish/subscribe router that carries events between agents
"""
import logging
import queue
import threading
from collections import deque
from collections.abc import Callable
from pathlib import Path
from typing import Any

from app.model.exceptions.router_exceptions import (DuplicateAgentException, DuplicateSubscriptionException,
                                                    InvalidPayloadValueException, QueueFullException,
                                                    UnknownAgentException, UnknownEventTypeException)
from app.model.reporting.config_args import ConfigArgs
from app.model.router.dispatch_stats import DispatchStats
from app.model.router.event import AgentId, DeliveryMode, Event, Subscription, iso_time
from app.model.runtime_constants import AgentNames, EventTypes, RuntimeConstants as rc
from app.model.vision.detection import Detection
from app.services.clock import Clock
from app.services.metrics_sink import MetricsSink

EventHandler = Callable[[Event], None]


class SubscriberQueue:
    """
        Bounded queue of a background subscriber. When full the oldest
        event is dropped to make room for the new one
    """

    capacity : int

    def __init__(self, capacity : int) -> None:
        self.capacity = capacity
        self.dropped = 0
        self._items : deque[Event] = deque()
        self._condition = threading.Condition()
        self._closed = False

    def offer(self, event : Event) -> Event | None:
        """
            Add an event
            :return: the event dropped to make room, if any
        """
        with self._condition:
            dropped = None
            if len(self._items) >= self.capacity:
                dropped = self._items.popleft()
                self.dropped += 1
            self._items.append(event)
            self._condition.notify()
            return dropped

    def poll(self) -> Event | None:
        with self._condition:
            return self._items.popleft() if self._items else None

    def take(self, timeout : float | None = None) -> Event | None:
        """
            Block until an event is available, the queue is closed or the timeout passes
        """
        with self._condition:
            if not self._items and not self._closed:
                self._condition.wait(timeout)
            return self._items.popleft() if self._items else None

    def drain(self) -> list[Event]:
        with self._condition:
            items = list(self._items)
            self._items.clear()
            return items

    def close(self) -> None:
        with self._condition:
            self._closed = True
            self._condition.notify_all()

    def __len__(self) -> int:
        with self._condition:
            return len(self._items)


class _Subscriber:
    subscription : Subscription
    handler : EventHandler
    queue : SubscriberQueue | None
    on_drop : Callable[[Event], None] | None

    def __init__(self, subscription, handler, subscriber_queue, on_drop) -> None:
        self.subscription = subscription
        self.handler = handler
        self.queue = subscriber_queue
        self.on_drop = on_drop
        self.delivered = 0


class MessageRouter:
    """
        Delivers events to subscribed agents in publish order.

        Producers call send_to_agent from any thread; it assigns the sequence
        number and enqueues without blocking. A single dispatch context (the
        run_dispatch thread, or whoever calls dispatch_pending) runs inline
        handlers and hands background deliveries to the subscribers' queues.
    """

    def __init__(self, clock : Clock,
                 metrics : MetricsSink | None = None,
                 queue_capacity : int = rc.ROUTER_QUEUE_CAPACITY,
                 background_capacity : int = rc.BACKGROUND_QUEUE_CAPACITY,
                 snapshot_dir : Path | None = None) -> None:
        self._clock = clock
        self._metrics = metrics if metrics is not None else MetricsSink()
        self._queue : queue.Queue = queue.Queue(maxsize=queue_capacity)
        self._background_capacity = background_capacity
        self._snapshot_dir = snapshot_dir.resolve() if snapshot_dir is not None else None

        self._lock = threading.Lock()
        self._publish_lock = threading.Lock()
        self._seq = 0
        self._started = False
        self._local = threading.local()

        self._event_types : set[str] = set()
        self._agents : dict[str, EventHandler] = {}
        self._subscribers : dict[str, list[_Subscriber]] = {}

        for event_type in EventTypes.ALL:
            self.register_event_type(event_type)

    @property
    def metrics(self) -> MetricsSink:
        return self._metrics

    def register_event_type(self, event_type : str) -> None:
        """
            Add an event type. Only allowed before dispatch starts
        """
        with self._lock:
            if self._started:
                raise UnknownEventTypeException(f"cannot register {event_type!r} after dispatch started")
            if event_type == "":
                raise UnknownEventTypeException("event type must be non-empty")
            self._event_types.add(event_type)
            self._subscribers.setdefault(event_type, [])

    def register_agent(self, name : str, handler : EventHandler) -> AgentId:
        """
            Register an agent and the callback that receives its events
        """
        with self._lock:
            if name == AgentNames.ROUTER or name in self._agents:
                raise DuplicateAgentException(f"agent {name!r} is already registered")
            agent = AgentId(name=name)
            self._agents[name] = handler
            logging.info("Registered agent %s", name)
            return agent

    def subscribe(self, agent : AgentId, event_type : str, mode : DeliveryMode,
                  capacity : int | None = None,
                  on_drop : Callable[[Event], None] | None = None) -> Subscription:
        """
            Subscribe an agent to an event type.

            :param capacity: queue capacity of a background subscription
            :param on_drop: called with every event dropped from a full background queue
        """
        with self._lock:
            if agent.name not in self._agents:
                raise UnknownAgentException(f"agent {agent.name!r} is not registered")
            if event_type not in self._event_types:
                raise UnknownEventTypeException(f"event type {event_type!r} is not registered")
            if any(s.subscription.agent == agent for s in self._subscribers[event_type]):
                raise DuplicateSubscriptionException(f"{agent.name} already subscribes to {event_type}")

            subscription = Subscription(agent=agent, event_type=event_type, mode=mode)
            subscriber_queue = None
            if mode is DeliveryMode.BACKGROUND:
                subscriber_queue = SubscriberQueue(capacity if capacity is not None else self._background_capacity)

            self._subscribers[event_type].append(
                _Subscriber(subscription, self._agents[agent.name], subscriber_queue, on_drop))
            logging.info("Subscribed %s to %s (%s)", agent.name, event_type, mode.value)
            return subscription

    def background_queue(self, subscription : Subscription) -> SubscriberQueue:
        for subscriber in self._subscribers.get(subscription.event_type, []):
            if subscriber.subscription == subscription and subscriber.queue is not None:
                return subscriber.queue
        raise UnknownAgentException(f"no background subscription {subscription.agent.name}/{subscription.event_type}")

    def subscriptions(self) -> list[Subscription]:
        with self._lock:
            return [s.subscription for subscribers in self._subscribers.values() for s in subscribers]

    def make_event(self, event_type : str, payload : dict[str, Any] | None = None,
                   source : AgentId | None = None) -> Event:
        """
            Build an event stamped with the current time. The sequence number
            is assigned when the event is published
        """
        if event_type not in self._event_types:
            raise UnknownEventTypeException(f"event type {event_type!r} is not registered")

        payload = dict(payload or {})
        for key, value in payload.items():
            self._check_payload_value(key, value)

        return Event(event_type=event_type,
                     timestamp=round(self._clock.now(), 3),
                     payload=payload,
                     source=source.name if source is not None else None)

    def _check_payload_value(self, key : Any, value : Any) -> None:
        if not isinstance(key, str) or key == "":
            raise InvalidPayloadValueException(f"payload key {key!r} must be a non-empty string")

        if isinstance(value, (str, bool, int, float, ConfigArgs)):
            return

        if isinstance(value, Path):
            if self._snapshot_dir is not None and not value.resolve().is_relative_to(self._snapshot_dir):
                raise InvalidPayloadValueException(f"{key}: {value} is outside the snapshot directory")
            return

        if isinstance(value, list) and all(isinstance(item, Detection) for item in value):
            return

        raise InvalidPayloadValueException(f"{key}: unsupported payload value of type {type(value).__name__}")

    def send_to_agent(self, target : AgentId | str, event : Event, source : AgentId | None = None) -> int:
        """
            Publish an event. target "router" fans out to every subscriber of
            the event type, any other target delivers to that agent only.

            :return: the sequence number assigned to the event
        """
        target_name = target.name if isinstance(target, AgentId) else target
        if target_name != AgentNames.ROUTER and target_name not in self._agents:
            raise UnknownAgentException(f"agent {target_name!r} is not registered")
        if event.event_type not in self._event_types:
            raise UnknownEventTypeException(f"event type {event.event_type!r} is not registered")

        source_name = source.name if source is not None else (event.source or AgentNames.ROUTER)

        with self._publish_lock:
            seq = self._seq + 1
            published = event.model_copy(update={"seq": seq, "source": source_name})
            try:
                self._queue.put_nowait((published, target_name, self._clock.now()))
            except queue.Full as e:
                self._metrics.increment(f"events.{event.event_type}.rejected")
                self._metrics.increment("errors.queue_full")
                raise QueueFullException(f"router queue full, {event.event_type} from {source_name} rejected") from e
            self._seq = seq

        self._metrics.increment(f"events.{event.event_type}.published")
        return seq

    def pending(self) -> int:
        return self._queue.qsize()

    def in_dispatch_context(self) -> bool:
        return getattr(self._local, "dispatching", False)

    def delivery_counts(self) -> dict[tuple[str, str], int]:
        """
            Deliveries per (agent, event type), background deliveries include
            events later dropped from the subscriber queue
        """
        with self._lock:
            return {(s.subscription.agent.name, event_type): s.delivered
                    for event_type, subscribers in self._subscribers.items() for s in subscribers}

    def dispatch_pending(self, stats : DispatchStats | None = None) -> DispatchStats:
        """
            Dispatch the events queued at call time on the calling context
        """
        stats = stats if stats is not None else DispatchStats()
        self._started = True

        for _ in range(self._queue.qsize()):
            try:
                item = self._queue.get_nowait()
            except queue.Empty:
                break
            self._dispatch(item, stats)

        return stats

    def run_dispatch(self, stop : threading.Event, poll_interval : float = 0.05) -> DispatchStats:
        """
            Dispatch loop for daemon mode, runs until stop is set and then
            flushes what is still queued
        """
        stats = DispatchStats()
        self._started = True

        while not stop.is_set():
            try:
                item = self._queue.get(timeout=poll_interval)
            except queue.Empty:
                continue
            self._dispatch(item, stats)

        self.dispatch_pending(stats)
        return stats

    def _targets(self, event : Event, target_name : str) -> list[_Subscriber]:
        with self._lock:
            subscribers = list(self._subscribers[event.event_type])
            if target_name == AgentNames.ROUTER:
                return subscribers

            direct = [s for s in subscribers if s.subscription.agent.name == target_name]
            if direct:
                return direct

            subscription = Subscription(agent=AgentId(name=target_name), event_type=event.event_type,
                                        mode=DeliveryMode.INLINE)
            return [_Subscriber(subscription, self._agents[target_name], None, None)]

    def _dispatch(self, item : tuple[Event, str, float], stats : DispatchStats) -> None:
        event, target_name, enqueued_at = item
        outcome = "delivered"
        self._local.dispatching = True

        try:
            for subscriber in self._targets(event, target_name):
                subscriber.delivered += 1
                stats.deliveries += 1
                self._metrics.increment(f"events.{event.event_type}.delivered")

                if subscriber.queue is None:
                    try:
                        subscriber.handler(event)
                    except Exception as e:
                        outcome = "handler_error"
                        stats.handler_errors += 1
                        self._metrics.increment(f"events.{event.event_type}.handler_errors")
                        self._metrics.increment("errors.handler_error")
                        logging.error("Handler of %s failed on seq %s: %s",
                                      subscriber.subscription.agent.name, event.seq, e)
                    continue

                dropped = subscriber.queue.offer(event)
                if dropped is not None:
                    if outcome == "delivered":
                        outcome = "dropped"
                    stats.dropped += 1
                    self._metrics.increment(f"events.{event.event_type}.dropped")
                    if subscriber.on_drop is not None:
                        try:
                            subscriber.on_drop(dropped)
                        except Exception as e:
                            logging.error("Drop callback of %s failed on seq %s: %s",
                                          subscriber.subscription.agent.name, dropped.seq, e)
        finally:
            self._local.dispatching = False

        latency_us = max(0.0, (self._clock.now() - enqueued_at) * 1e6)
        stats.dispatched += 1
        stats.latency_us.append(latency_us)
        self._metrics.observe("dispatch_latency_us", latency_us)

        logging.info("ts=%s seq=%d type=%s source=%s latency_us=%d outcome=%s",
                     iso_time(self._clock.now()), event.seq, event.event_type, event.source,
                     int(latency_us), outcome)
