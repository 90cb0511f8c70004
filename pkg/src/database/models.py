from sqlalchemy import (
    JSON, Boolean, Column, DateTime, Float, ForeignKey, Integer, String, UniqueConstraint
)
from sqlalchemy.orm import declarative_base, relationship
from sqlalchemy.sql import func

Base = declarative_base()


class RunRecord(Base):
    """
    One CLI invocation: the manifest fields that make a run reproducible.
    """
    __tablename__ = 'runs'
    id = Column(String(64), primary_key=True)
    tool_version = Column(String, nullable=False)
    command = Column(String, nullable=False, index=True)
    seed = Column(Integer, nullable=True)
    graph_hash = Column(String(64), nullable=True, index=True)
    rng = Column(String, nullable=True)
    tolerances = Column(JSON, nullable=True)
    outputs = Column(JSON, nullable=True)
    created_at = Column(DateTime, nullable=False, server_default=func.now())

    checks = relationship("CheckRecord", back_populates="run", cascade="all, delete-orphan")


class CheckRecord(Base):
    """
    One verdict of a verification suite within a run.
    """
    __tablename__ = 'checks'
    id = Column(Integer, primary_key=True, autoincrement=True)
    run_id = Column(String(64), ForeignKey('runs.id'), nullable=False)
    suite = Column(String, nullable=False, index=True)
    check = Column(String, nullable=False)
    passed = Column(Boolean, nullable=False)
    value = Column(Float, nullable=True)
    bound = Column(Float, nullable=True)
    residual = Column(Float, nullable=True)
    __table_args__ = (UniqueConstraint('run_id', 'suite', 'check', name='uq_run_check'),)

    run = relationship("RunRecord", back_populates="checks")
