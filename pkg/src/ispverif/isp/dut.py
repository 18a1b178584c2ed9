"""The two interchangeable DUTs.

Both expose the same surface: a control-bus target socket over the ISP
register window, a back-door hook, ``stream_in`` for input beats and
``out_ap`` for output beats. Configuration is latched at each frame's sof.
"""

from __future__ import annotations

from collections import deque
from typing import Optional

from ispverif.errors import TestbenchFatal
from ispverif.isp.faults import FaultSpec, Stage
from ispverif.isp.pipeline import IspConfig, ref_process_frame
from ispverif.isp.regs import RegisterBank
from ispverif.sim.kernel import Notification, ProcessBody
from ispverif.tlm.component import AnalysisPort, Component
from ispverif.tlm.payload import GenericPayload, TargetSocket
from ispverif.uvc.stream import Frame, StreamBeat

FRAME_SIZE_MISMATCH = "FRAME_SIZE_MISMATCH"
BAD_CONFIG = "BAD_CONFIG"


class IspDut(Component):
    def __init__(self, name: str, parent: Optional[Component] = None, period: int = 10):
        super().__init__(name, parent)
        self.period = period
        self.regs = RegisterBank()
        self.target = TargetSocket(f"{name}.target", self._transport)
        self.out_ap = AnalysisPort(f"{name}.out_ap")
        self.frames_in = 0
        self.frames_out = 0
        self.frames_dropped = 0

    @property
    def backdoor(self) -> RegisterBank:
        return self.regs

    def reset(self) -> None:
        self.regs.reset()

    def _transport(self, payload: GenericPayload, delay: int) -> int:
        self.regs.bus_access(payload)
        return delay

    def _latch(self) -> Optional[IspConfig]:
        """Config for the frame starting now, or None if the frame is dropped."""
        cfg = self.regs.current_config()
        if not cfg.pipe_en:
            self.regs.count_drop()
            self.frames_dropped += 1
            return None
        try:
            cfg.validate()
        except TestbenchFatal as exc:
            self.error(BAD_CONFIG, exc.message)
            return None
        return cfg

    def stream_in(self, beat: StreamBeat) -> None:
        raise NotImplementedError


class ReferenceWrapper(IspDut):
    """The golden model behind the DUT ports; output is produced in zero time at eof."""

    def __init__(self, name: str, parent: Optional[Component] = None, period: int = 10):
        super().__init__(name, parent, period)
        self._cfg: Optional[IspConfig] = None
        self._buf: Optional[bytearray] = None

    def stream_in(self, beat: StreamBeat) -> None:
        if beat.sof:
            if self._buf is not None:
                self.error(FRAME_SIZE_MISMATCH, "sof before previous frame's eof")
            self._cfg = self._latch()
            self._buf = bytearray() if self._cfg is not None else None
            if self._buf is not None:
                self.frames_in += 1
                self.regs.set_status(busy=True)
        if self._buf is None:
            return
        self._buf.append(beat.data)
        if not beat.eof:
            return
        cfg, buf = self._cfg, self._buf
        self._buf = None
        if len(buf) != cfg.width * cfg.height:
            self.error(FRAME_SIZE_MISMATCH, f"{len(buf)} beats for a {cfg.width}x{cfg.height} frame")
            self.regs.set_status(busy=False)
            return
        out = ref_process_frame(cfg, Frame(cfg.width, cfg.height, bytes(buf)))
        last = len(out.pixels) - 1
        for i, p in enumerate(out.pixels):
            self.out_ap.publish(StreamBeat(p, i == 0, i == last))
        self.frames_out += 1
        self.regs.set_status(busy=False, frame_done=True)


class _InFrame:
    __slots__ = ("cfg", "index", "rows", "row", "emitted_rows")

    def __init__(self, cfg: IspConfig):
        self.cfg = cfg
        self.index = 0
        self.rows: list[list[int]] = []
        self.row: list[int] = []
        self.emitted_rows = 0


class StagedPipeline(IspDut):
    """Timed stand-in for the RTL.

    Pixel stages are evaluated per beat as it arrives; the convolution keeps a
    line buffer and releases output row ``r`` once input row ``r + 1`` is
    complete. Output leaves one beat per cycle from an internal FIFO.
    """

    def __init__(self, name: str, parent: Optional[Component] = None, period: int = 10,
                 fault: Optional[FaultSpec] = None):
        super().__init__(name, parent, period)
        self.fault = fault
        self._frame: Optional[_InFrame] = None
        self._fifo: deque[StreamBeat] = deque()
        self._fifo_note: Optional[Notification] = None
        self._in_flight = 0

    # -- input side -------------------------------------------------------

    def stream_in(self, beat: StreamBeat) -> None:
        if beat.sof:
            if self._frame is not None:
                self.error(FRAME_SIZE_MISMATCH, "sof before previous frame's eof")
                self._abandon()
            cfg = self._latch()
            if cfg is None:
                self._frame = None
                return
            self._frame = _InFrame(cfg)
            self._in_flight += 1
            self.frames_in += 1
            self.regs.set_status(busy=True)
        fr = self._frame
        if fr is None:
            return
        cfg = fr.cfg
        w, h = cfg.width, cfg.height
        if fr.index >= w * h:
            self.error(FRAME_SIZE_MISMATCH, f"more than {w * h} beats in a {w}x{h} frame")
            self._abandon()
            return

        v = beat.data
        fault = self.fault
        idx = fr.index
        if cfg.bl_en:
            v = v - cfg.black_level if v > cfg.black_level else 0
            if fault is not None and fault.stage is Stage.BL and fault.hits(idx):
                v ^= fault.xor_mask
        if cfg.gain_en:
            v = (v * cfg.gain) >> 8
            if v > 255:
                v = 255
            if fault is not None and fault.stage is Stage.GAIN and fault.hits(idx):
                v ^= fault.xor_mask
        if cfg.gamma_en:
            v = cfg.lut[v]
            if fault is not None and fault.stage is Stage.GAMMA and fault.hits(idx):
                v ^= fault.xor_mask
        fr.row.append(v)
        fr.index = idx + 1

        if len(fr.row) == w:
            fr.rows.append(fr.row)
            fr.row = []
            completed = len(fr.rows) - 1
            if not cfg.conv_en:
                self._emit_row(fr, completed, fr.rows[completed])
            elif completed >= 1:
                self._emit_row(fr, completed - 1, self._conv_row(fr, completed - 1))
            if completed == h - 1 and cfg.conv_en:
                self._emit_row(fr, completed, self._conv_row(fr, completed))

        if beat.eof:
            if fr.index != w * h:
                self.error(FRAME_SIZE_MISMATCH, f"eof after {fr.index} beats in a {w}x{h} frame")
                self._abandon()
                return
            self._frame = None

    def _abandon(self) -> None:
        self._frame = None
        self._in_flight -= 1
        if self._in_flight == 0 and not self._fifo:
            self.regs.set_status(busy=False)

    def _conv_row(self, fr: _InFrame, y: int) -> list[int]:
        cfg = fr.cfg
        rows = fr.rows
        last = cfg.height - 1
        up = rows[y - 1] if y > 0 else rows[0]
        mid = rows[y]
        dn = rows[y + 1] if y < last else rows[last]
        k0, k1, k2, k3, k4, k5, k6, k7, k8 = cfg.kernel
        shift = cfg.shift
        w = cfg.width
        out = []
        for x in range(w):
            xl = x - 1 if x > 0 else 0
            xr = x + 1 if x < w - 1 else w - 1
            acc = (k0 * up[xl] + k1 * up[x] + k2 * up[xr]
                   + k3 * mid[xl] + k4 * mid[x] + k5 * mid[xr]
                   + k6 * dn[xl] + k7 * dn[x] + k8 * dn[xr]) >> shift
            out.append(0 if acc < 0 else 255 if acc > 255 else acc)
        fault = self.fault
        if fault is not None and fault.stage is Stage.CONV:
            base = y * w
            for x in range(w):
                if fault.hits(base + x):
                    out[x] ^= fault.xor_mask
        # Rows older than the window are no longer needed.
        if y >= 2:
            rows[y - 2] = None  # type: ignore[call-overload]
        return out

    def _emit_row(self, fr: _InFrame, y: int, values: list[int]) -> None:
        h = fr.cfg.height
        last_x = len(values) - 1
        fifo = self._fifo
        for x, v in enumerate(values):
            fifo.append(StreamBeat(v, y == 0 and x == 0, y == h - 1 and x == last_x))
        fr.emitted_rows += 1
        if self._fifo_note is not None:
            self._fifo_note.notify()

    # -- output side ------------------------------------------------------

    def run_phase(self) -> ProcessBody:
        kernel = self.kernel
        self._fifo_note = kernel.notification(f"{self.full_name}.fifo")
        fifo = self._fifo
        publish = self.out_ap.publish
        while True:
            while not fifo:
                yield self._fifo_note.wait()
            yield kernel.wait(self.period)
            beat = fifo.popleft()
            publish(beat)
            if beat.eof:
                self.frames_out += 1
                self._in_flight -= 1
                self.regs.set_status(busy=self._in_flight > 0, frame_done=True)
