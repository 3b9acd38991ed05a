"""
Database models for the simulation run archive
"""
from sqlalchemy import Column, Integer, String, Text, DateTime, Enum, Float, ForeignKey, BigInteger
from sqlalchemy.orm import declarative_base, relationship
from datetime import datetime, timezone
import enum

Base = declarative_base()


class RunStatus(enum.Enum):
    """Archived run outcome"""
    COMPLETED = "completed"
    FAILED = "failed"


class RunRecord(Base):
    """One archived simulation run"""
    __tablename__ = 'simulation_runs'

    id = Column(Integer, primary_key=True, autoincrement=True)
    scenario_name = Column(String(200), nullable=False)
    seed = Column(BigInteger, nullable=False)
    report_digest = Column(String(64), nullable=True)
    report_path = Column(String(500), nullable=True)
    status = Column(Enum(RunStatus), default=RunStatus.COMPLETED)
    security_layer = Column(Integer, default=0)
    auth_windows = Column(Integer, default=0)
    auth_accepted = Column(Integer, default=0)
    frames_received = Column(Integer, default=0)
    adversarial_accepted = Column(Integer, default=0)
    collisions = Column(Integer, default=0)
    mean_dynamic_range_db = Column(Float, nullable=True)
    error_message = Column(Text, nullable=True)
    created_at = Column(DateTime, default=lambda: datetime.now(timezone.utc))

    # Relationships
    auth_records = relationship("AuthRecord", back_populates="run", cascade="all, delete-orphan")

    def __repr__(self):
        return f"<RunRecord(id={self.id}, scenario='{self.scenario_name}', seed={self.seed}, status={self.status})>"


class AuthRecord(Base):
    """One identification window of an archived run"""
    __tablename__ = 'auth_records'

    id = Column(Integer, primary_key=True, autoincrement=True)
    run_id = Column(Integer, ForeignKey('simulation_runs.id'), nullable=False)
    time_s = Column(Float, nullable=False)
    node_id = Column(String(100), nullable=False)
    source = Column(String(100), nullable=False)
    strategy = Column(String(20), nullable=False)
    carrier_hz = Column(Float, nullable=False)
    verdict = Column(String(40), nullable=False)
    score = Column(Float, nullable=True)
    dynamic_range_db = Column(Float, nullable=True)

    # Relationships
    run = relationship("RunRecord", back_populates="auth_records")

    def __repr__(self):
        return f"<AuthRecord(run={self.run_id}, node='{self.node_id}', verdict={self.verdict})>"
