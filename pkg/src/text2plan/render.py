"""Deterministic SVG (and optional PNG) drawings of floorplans."""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from xml.sax.saxutils import escape

from .geometry import Floorplan
from .rooms import RoomType

PALETTE = {
    RoomType.LivingRoom: "#EE4D4D",
    RoomType.MasterRoom: "#C67C7B",
    RoomType.Kitchen: "#FFD274",
    RoomType.Bathroom: "#BEBEBE",
    RoomType.DiningRoom: "#BFE3E8",
    RoomType.ChildRoom: "#7BA779",
    RoomType.StudyRoom: "#E87A90",
    RoomType.SecondRoom: "#FF8C69",
    RoomType.GuestRoom: "#1F849B",
    RoomType.Balcony: "#727171",
    RoomType.Entrance: "#785A67",
    RoomType.Storage: "#D3A2C7",
    RoomType.WallIn: "#A0A0A0",
    RoomType.Bedroom: "#9D7CC1",
    RoomType.Corridor: "#E5D8B0",
    RoomType.Laundry: "#8FB9E0",
    RoomType.Garage: "#6B705C",
    RoomType.Office: "#B5838D",
    RoomType.Pantry: "#DDA15E",
    RoomType.Closet: "#CDB4DB",
    RoomType.Utility: "#84A59D",
    RoomType.Gym: "#F28482",
    RoomType.Unknown: "#DDDDDD",
    RoomType.InteriorDoor: "#2B2B2B",
    RoomType.FrontDoor: "#1B4F72",
}


@dataclass(frozen=True)
class RenderStyle:
    canvas: int = 512
    stroke_width: float = 2.0
    door_width: float = 6.0
    font_size: int = 12
    background: str = "#FFFFFF"
    stroke: str = "#000000"
    labels: bool = True
    palette: dict = field(default_factory=lambda: dict(PALETTE))

    def __post_init__(self):
        missing = [t.label for t in RoomType if t not in self.palette]
        if missing:
            raise ValueError(f"palette lacks colors for {missing}")

    @property
    def scale(self) -> float:
        return self.canvas / 256.0


def _num(v: float) -> str:
    return f"{v:.2f}".rstrip("0").rstrip(".")


def render_svg(plan: Floorplan, style: RenderStyle = RenderStyle()) -> bytes:
    s = style.scale
    W = style.canvas
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{W}" viewBox="0 0 {W} {W}">',
        f'<rect x="0" y="0" width="{W}" height="{W}" fill="{style.background}"/>',
    ]
    for i, lp in plan.rooms():
        pts = " ".join(f"{_num(x * s)},{_num(y * s)}" for x, y in lp.corners)
        out.append(f'<polygon data-room="{i}" data-type="{lp.room_type.label}" points="{pts}" '
                   f'fill="{style.palette[lp.room_type]}" stroke="{style.stroke}" '
                   f'stroke-width="{_num(style.stroke_width)}"/>')
    for i, lp in plan.doors():
        pts = " ".join(f"{_num(x * s)},{_num(y * s)}" for x, y in lp.corners)
        tag = "polyline" if len(lp) == 2 else "polygon"
        out.append(f'<{tag} data-room="{i}" data-type="{lp.room_type.label}" points="{pts}" fill="none" '
                   f'stroke="{style.palette[lp.room_type]}" stroke-width="{_num(style.door_width)}" '
                   f'stroke-linecap="butt"/>')
    if style.labels:
        for i, lp in plan.rooms():
            cx, cy = lp.centroid()
            out.append(f'<text x="{_num(cx * s)}" y="{_num(cy * s)}" font-family="sans-serif" '
                       f'font-size="{style.font_size}" text-anchor="middle" dominant-baseline="middle">'
                       f'{escape(lp.room_type.display)}</text>')
    out.append("</svg>")
    return ("\n".join(out) + "\n").encode("utf-8")


def render_png(plan: Floorplan, style: RenderStyle = RenderStyle(canvas=512)) -> bytes:
    """Raster preview drawn from the same primitives as the SVG (labels omitted)."""
    import io

    from PIL import Image, ImageDraw

    s = style.scale
    img = Image.new("RGB", (style.canvas, style.canvas), style.background)
    draw = ImageDraw.Draw(img)
    for _, lp in plan.rooms():
        pts = [(x * s, y * s) for x, y in lp.corners]
        draw.polygon(pts, fill=style.palette[lp.room_type], outline=style.stroke)
    for _, lp in plan.doors():
        pts = [(x * s, y * s) for x, y in lp.corners]
        if len(pts) > 2:
            pts.append(pts[0])
        draw.line(pts, fill=style.palette[lp.room_type], width=max(1, round(style.door_width)))
    buf = io.BytesIO()
    img.save(buf, format="PNG")
    return buf.getvalue()


def write_svg(path, plan: Floorplan, style: RenderStyle = RenderStyle()) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(render_svg(plan, style))
    return path
