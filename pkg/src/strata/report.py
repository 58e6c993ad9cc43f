"""Validation reports: violations are plain data, never exceptions."""
import dataclasses


@dataclasses.dataclass
class Report:
    violations: list = dataclasses.field(default_factory=list)
    info: dict = dataclasses.field(default_factory=dict)

    @property
    def ok(self):
        return not self.violations

    def __bool__(self):
        return self.ok

    def add(self, kind, **witness):
        self.violations.append({"kind": kind, **witness})

    def extend(self, other, **context):
        for v in other.violations:
            self.violations.append({**context, **v})
        return self

    def first(self):
        return self.violations[0] if self.violations else None

    def to_dict(self):
        out = {"ok": self.ok, "violations": self.violations}
        if self.info:
            out["info"] = self.info
        return out

    def text(self):
        if self.ok:
            return "ok"
        lines = [f"{len(self.violations)} violation(s)"]
        for v in self.violations:
            fields = ", ".join(f"{k}={v[k]}" for k in sorted(v) if k != "kind")
            lines.append(f"  {v['kind']}: {fields}")
        return "\n".join(lines)
