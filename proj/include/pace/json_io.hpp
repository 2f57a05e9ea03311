// nlohmann/json adapters for the core value types.
#pragma once

#include <json.hpp>

#include "pace/grid.hpp"
#include "pace/symlang.hpp"

namespace pace {

inline void to_json(nlohmann::json& j, const Cell& c) { j = {{"col", c.col}, {"row", c.row}}; }
inline void from_json(const nlohmann::json& j, Cell& c) {
  j.at("col").get_to(c.col);
  j.at("row").get_to(c.row);
}

inline void to_json(nlohmann::json& j, const Offset& o) {
  j = {{"dcol", o.dcol}, {"drow", o.drow}};
}
inline void from_json(const nlohmann::json& j, Offset& o) {
  j.at("dcol").get_to(o.dcol);
  j.at("drow").get_to(o.drow);
}

inline void to_json(nlohmann::json& j, const Orientation& o) {
  j = (o == Orientation::Horizontal) ? "horizontal" : "vertical";
}
inline void from_json(const nlohmann::json& j, Orientation& o) {
  const std::string s = j.get<std::string>();
  if (s == "horizontal" || s == "h") {
    o = Orientation::Horizontal;
  } else if (s == "vertical" || s == "v") {
    o = Orientation::Vertical;
  } else {
    throw GridError("unknown orientation: " + s);
  }
}

inline void to_json(nlohmann::json& j, const PrimitiveBlock& b) {
  j = {{"orientation", b.orientation}, {"col", b.anchor.col}, {"row", b.anchor.row}};
}
inline void from_json(const nlohmann::json& j, PrimitiveBlock& b) {
  j.at("orientation").get_to(b.orientation);
  j.at("col").get_to(b.anchor.col);
  j.at("row").get_to(b.anchor.row);
}

inline void to_json(nlohmann::json& j, const PlacedBlock& b) {
  j = {{"orientation", b.orientation}, {"dcol", b.offset.dcol}, {"drow", b.offset.drow}};
}
inline void from_json(const nlohmann::json& j, PlacedBlock& b) {
  j.at("orientation").get_to(b.orientation);
  j.at("dcol").get_to(b.offset.dcol);
  j.at("drow").get_to(b.offset.drow);
}

inline void to_json(nlohmann::json& j, const ExpansionStep& s) {
  j = {{"action", s.action}, {"offset", s.offset}};
}
inline void from_json(const nlohmann::json& j, ExpansionStep& s) {
  j.at("action").get_to(s.action);
  j.at("offset").get_to(s.offset);
}

inline void to_json(nlohmann::json& j, const PlacedAction& a) {
  j = {{"action", a.action}, {"col", a.anchor.col}, {"row", a.anchor.row}};
}
inline void from_json(const nlohmann::json& j, PlacedAction& a) {
  j.at("action").get_to(a.action);
  j.at("col").get_to(a.anchor.col);
  j.at("row").get_to(a.anchor.row);
}

inline void to_json(nlohmann::json& j, const Program& p) { j = p.steps; }
inline void from_json(const nlohmann::json& j, Program& p) { j.get_to(p.steps); }

inline void to_json(nlohmann::json& j, const Footprint& f) {
  j = nlohmann::json::array();
  for (const Offset& o : f.offsets()) j.push_back(o);
}

inline void to_json(nlohmann::json& j, const Action& a) {
  j = {{"id", a.id},
       {"kind", a.kind == ActionKind::Primitive ? "primitive" : "abstraction"},
       {"name", a.name},
       {"expansion", a.expansion},
       {"flat", a.flat},
       {"footprint", a.footprint},
       {"size", a.size}};
}

}  // namespace pace
