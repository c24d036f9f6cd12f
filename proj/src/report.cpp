#include "qg/report.hpp"

#include <algorithm>
#include <cstdio>

namespace qg {

std::string format12(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

nlohmann::ordered_json check_json(const TheoremCheck& c) {
  nlohmann::ordered_json j;
  j["theorem"] = c.theorem;
  j["case"] = c.case_id;
  j["seed"] = c.seed;
  if (c.alpha) {
    j["alpha"] = std::stod(format12(*c.alpha));
  } else {
    j["alpha"] = nullptr;
  }
  j["lhs"] = c.lhs;
  j["rhs"] = c.rhs;
  j["status"] = status_name(c.status);
  j["reason"] = c.reason;
  return j;
}

namespace {

struct Tally {
  int pass = 0;
  int fail = 0;
  int skip = 0;
};

std::vector<std::pair<std::string, Tally>> tallies(const HarnessReport& r) {
  std::vector<std::pair<std::string, Tally>> out;
  for (const std::string& id : theorem_ids()) out.push_back({id, {}});
  for (const TheoremCheck& c : r.checks) {
    auto it = std::find_if(out.begin(), out.end(), [&](const auto& p) { return p.first == c.theorem; });
    if (it == out.end()) it = out.insert(out.end(), {c.theorem, {}});
    switch (c.status) {
      case CheckStatus::Pass:
        ++it->second.pass;
        break;
      case CheckStatus::Fail:
        ++it->second.fail;
        break;
      case CheckStatus::Skip:
        ++it->second.skip;
        break;
    }
  }
  return out;
}

}  // namespace

std::string report_json(const HarnessReport& r) {
  nlohmann::ordered_json out;
  nlohmann::ordered_json checks = nlohmann::ordered_json::array();
  for (const TheoremCheck& c : r.checks) checks.push_back(check_json(c));
  out["checks"] = std::move(checks);
  nlohmann::ordered_json summary;
  for (const auto& [id, t] : tallies(r)) {
    if (t.pass + t.fail + t.skip == 0) continue;
    summary[id] = {{"pass", t.pass}, {"fail", t.fail}, {"skip", t.skip}};
  }
  out["summary"] = std::move(summary);
  out["random_cases"] = r.random_cases;
  out["random_skip_fraction"] = std::stod(format12(r.random_skip_fraction()));
  out["ok"] = r.ok();
  return out.dump(2) + "\n";
}

std::string summary_table(const HarnessReport& r) {
  std::string out;
  char buf[128];
  std::snprintf(buf, sizeof buf, "%-14s %6s %6s %6s\n", "theorem", "pass", "fail", "skip");
  out += buf;
  for (const auto& [id, t] : tallies(r)) {
    if (t.pass + t.fail + t.skip == 0) continue;
    std::snprintf(buf, sizeof buf, "%-14s %6d %6d %6d\n", id.c_str(), t.pass, t.fail, t.skip);
    out += buf;
  }
  std::snprintf(buf, sizeof buf, "random skip fraction %s (ceiling %s)\n", format12(r.random_skip_fraction()).c_str(),
                format12(r.skip_ceiling).c_str());
  out += buf;
  out += r.ok() ? "result: ok\n" : "result: FAILED\n";
  return out;
}

}  // namespace qg
