#pragma once

#include "gasper/time.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace gasper {

/// One trace line: {"tick", "kind", "actor", "payload"}. actor is -1 for
/// events not tied to a validator.
struct trace_event {
   tick_t tick = 0;
   std::string kind;
   std::int64_t actor = -1;
   nlohmann::json payload;

   nlohmann::json to_json() const;
   static trace_event from_json(const nlohmann::json& j);
};

struct trace {
   std::vector<trace_event> events;

   void add(tick_t tick, std::string kind, std::int64_t actor, nlohmann::json payload);
   std::string to_jsonl() const;
   void write_jsonl(std::ostream& out) const;
   void write_file(const std::string& path) const;
   static trace read_jsonl(std::istream& in);
   static trace read_file(const std::string& path);
};

}  // namespace gasper
