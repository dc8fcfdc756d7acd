import json
from dataclasses import dataclass, field as dc_field
from typing import Any, Dict, List, Optional

REPORT_FIELDS = ('command', 'field', 'group_order', 't0_dim', 't1_dim', 't1_equivariant_dim',
                 'obstruction_dim', 'certified', 'lifts', 'witness', 'truncation')


@dataclass
class Report:
    command: str
    field: Optional[str] = None
    group_order: Optional[int] = None
    t0_dim: Optional[int] = None
    t1_dim: Optional[int] = None
    t1_equivariant_dim: Optional[int] = None
    obstruction_dim: Optional[int] = None
    certified: Optional[str] = None
    lifts: Optional[List[Dict[str, Any]]] = None
    witness: Optional[List[str]] = None
    truncation: Optional[int] = None
    details: Dict[str, Any] = dc_field(default_factory=dict)
    exit_code: int = 0

    def __repr__(self):
        return f'<Report {self.command}>'

    def to_dict(self) -> Dict[str, Any]:
        rv = {name: getattr(self, name) for name in REPORT_FIELDS}
        rv['details'] = self.details
        return rv

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2, ensure_ascii=False) + "\n"

    def to_text(self) -> str:
        """纯文本报告: 字段顺序固定, None 字段省略"""
        lines = [f"command: {self.command}"]
        for name in REPORT_FIELDS[1:]:
            value = getattr(self, name)
            if value is None or name in ('lifts', 'witness'):
                continue
            lines.append(f"{name}: {value}")
        if self.witness is not None:
            lines.append("witness: " + ", ".join(self.witness))
        for key in sorted(self.details):
            lines.extend(_text_lines(key, self.details[key], 0))
        if self.lifts is not None:
            lines.append(f"lifts: {len(self.lifts)}")
            for entry in self.lifts:
                head = f"  order {entry.get('order')}"
                if 'class' in entry:
                    head += f" class {entry['class']}"
                lines.append(head + ": " + "; ".join(entry.get('generators', [])))
        return "\n".join(lines) + "\n"


def _text_lines(key: str, value: Any, indent: int) -> List[str]:
    pad = "  " * indent
    if isinstance(value, dict):
        out = [f"{pad}{key}:"]
        for k in sorted(value):
            out.extend(_text_lines(str(k), value[k], indent + 1))
        return out
    if isinstance(value, (list, tuple)):
        if all(not isinstance(v, (dict, list, tuple)) for v in value):
            return [f"{pad}{key}: " + ", ".join(str(v) for v in value)]
        out = [f"{pad}{key}:"]
        for i, v in enumerate(value):
            out.extend(_text_lines(str(i), v, indent + 1))
        return out
    if isinstance(value, bool):
        value = 'yes' if value else 'no'
    return [f"{pad}{key}: {value}"]
