#include "gasper/trace.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gasper {

using nlohmann::json;

json trace_event::to_json() const {
   json j;
   j["tick"] = tick;
   j["kind"] = kind;
   j["actor"] = actor;
   j["payload"] = payload;
   return j;
}

trace_event trace_event::from_json(const json& j) {
   trace_event e;
   e.tick = j.at("tick").get<tick_t>();
   e.kind = j.at("kind").get<std::string>();
   e.actor = j.at("actor").get<std::int64_t>();
   e.payload = j.at("payload");
   return e;
}

void trace::add(tick_t tick, std::string kind, std::int64_t actor, json payload) {
   events.push_back({tick, std::move(kind), actor, std::move(payload)});
}

void trace::write_jsonl(std::ostream& out) const {
   for (const auto& e : events) out << e.to_json().dump() << '\n';
}

std::string trace::to_jsonl() const {
   std::ostringstream out;
   write_jsonl(out);
   return out.str();
}

void trace::write_file(const std::string& path) const {
   std::ofstream out(path, std::ios::binary);
   if (!out) throw std::runtime_error("cannot write " + path);
   write_jsonl(out);
}

trace trace::read_jsonl(std::istream& in) {
   trace t;
   std::string line;
   std::size_t n = 0;
   while (std::getline(in, line)) {
      ++n;
      if (line.empty()) continue;
      try {
         t.events.push_back(trace_event::from_json(json::parse(line)));
      } catch (const json::exception& e) {
         throw std::runtime_error("trace line " + std::to_string(n) + ": " + e.what());
      }
   }
   return t;
}

trace trace::read_file(const std::string& path) {
   std::ifstream in(path, std::ios::binary);
   if (!in) throw std::runtime_error("cannot read " + path);
   return read_jsonl(in);
}

}  // namespace gasper
