// SPDX-License-Identifier: Apache-2.0

#include "graphfuse/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <optional>
#include <set>

#include "graphfuse/conll.hpp"
#include "graphfuse/errors.hpp"

namespace graphfuse {

std::vector<Span> extract_spans(std::span<const std::string> labels) {
  std::vector<Span> spans;
  std::optional<Span> open;
  auto close = [&] {
    if (open) spans.push_back(std::move(*open));
    open.reset();
  };
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const std::string& l = labels[i];
    const bool begin = l.size() > 2 && l[0] == 'B' && l[1] == '-';
    const bool inside = l.size() > 2 && l[0] == 'I' && l[1] == '-';
    if (!begin && !inside) {
      close();
      continue;
    }
    std::string type = l.substr(2);
    if (inside && open && open->type == type) {
      open->end = i;
      continue;
    }
    close();
    open = Span{std::move(type), i, i};
  }
  close();
  return spans;
}

Prf prf_from_counts(std::size_t tp, std::size_t fp, std::size_t fn) {
  Prf r;
  if (tp + fp > 0) r.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  if (tp + fn > 0) r.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  if (r.precision + r.recall > 0.0) {
    r.f1 = 2.0 * r.precision * r.recall / (r.precision + r.recall);
  }
  return r;
}

EvalReport score(const std::vector<std::vector<std::string>>& gold,
                 const std::vector<std::vector<std::string>>& pred) {
  if (gold.size() != pred.size()) {
    throw DimensionError("score: " + std::to_string(gold.size()) + " gold sentences vs " +
                         std::to_string(pred.size()) + " predicted");
  }
  EvalReport report;
  std::map<std::string, EntityScore> by_type;
  std::size_t correct_tokens = 0;
  for (std::size_t s = 0; s < gold.size(); ++s) {
    if (gold[s].size() != pred[s].size()) {
      throw DimensionError("score: sentence " + std::to_string(s) + " has " +
                           std::to_string(gold[s].size()) + " gold labels but " +
                           std::to_string(pred[s].size()) + " predictions");
    }
    std::vector<std::string> g, p;
    for (std::size_t i = 0; i < gold[s].size(); ++i) {
      if (gold[s][i] == kIgnoreLabel) continue;
      g.push_back(gold[s][i]);
      p.push_back(pred[s][i]);
      if (gold[s][i] == pred[s][i]) ++correct_tokens;
    }
    report.tokens += g.size();
    const std::vector<Span> gs = extract_spans(g);
    const std::vector<Span> ps = extract_spans(p);
    report.gold_spans += gs.size();
    report.pred_spans += ps.size();
    const std::set<Span> gold_set(gs.begin(), gs.end());
    const std::set<Span> pred_set(ps.begin(), ps.end());
    for (const Span& sp : gs) {
      EntityScore& e = by_type[sp.type];
      if (pred_set.contains(sp)) ++e.tp; else ++e.fn;
    }
    for (const Span& sp : ps) {
      if (!gold_set.contains(sp)) ++by_type[sp.type].fp;
    }
  }

  std::size_t tp = 0, fp = 0, fn = 0, present = 0;
  for (auto& [type, e] : by_type) {
    e.type = type;
    e.prf = prf_from_counts(e.tp, e.fp, e.fn);
    tp += e.tp;
    fp += e.fp;
    fn += e.fn;
    if (e.support() > 0) {
      ++present;
      report.macro.precision += e.prf.precision;
      report.macro.recall += e.prf.recall;
      report.macro.f1 += e.prf.f1;
    }
    report.entities.push_back(e);
  }
  if (present > 0) {
    report.macro.precision /= static_cast<double>(present);
    report.macro.recall /= static_cast<double>(present);
    report.macro.f1 /= static_cast<double>(present);
  }
  report.micro = prf_from_counts(tp, fp, fn);
  if (report.tokens > 0) {
    report.token_accuracy =
        static_cast<double>(correct_tokens) / static_cast<double>(report.tokens);
  }
  return report;
}

nlohmann::json to_json(const EvalReport& report) {
  auto prf = [](const Prf& p) {
    return nlohmann::json{{"precision", p.precision}, {"recall", p.recall}, {"f1", p.f1}};
  };
  nlohmann::json entities = nlohmann::json::array();
  for (const EntityScore& e : report.entities) {
    nlohmann::json row = prf(e.prf);
    row["type"] = e.type;
    row["support"] = e.support();
    row["tp"] = e.tp;
    row["fp"] = e.fp;
    row["fn"] = e.fn;
    entities.push_back(std::move(row));
  }
  return {{"entities", entities},
          {"micro", prf(report.micro)},
          {"macro", prf(report.macro)},
          {"token_accuracy", report.token_accuracy},
          {"tokens", report.tokens},
          {"gold_spans", report.gold_spans},
          {"pred_spans", report.pred_spans}};
}

std::string format_table(const EvalReport& report) {
  std::size_t width = 10;
  for (const EntityScore& e : report.entities) width = std::max(width, e.type.size());
  std::string out;
  char buf[256];
  auto row = [&](const std::string& name, const Prf& p, std::size_t support) {
    std::snprintf(buf, sizeof buf, "%-*s %9.3f %9.3f %9.3f %9zu\n", static_cast<int>(width),
                  name.c_str(), p.precision, p.recall, p.f1, support);
    out += buf;
  };
  std::snprintf(buf, sizeof buf, "%-*s %9s %9s %9s %9s\n", static_cast<int>(width), "Entity",
                "Prec.", "Rec.", "F1", "Support");
  out += buf;
  for (const EntityScore& e : report.entities) row(e.type, e.prf, e.support());
  out += std::string(width + 40, '-') + "\n";
  row("Micro avg", report.micro, report.gold_spans);
  row("Macro avg", report.macro, report.gold_spans);
  std::snprintf(buf, sizeof buf, "Token accuracy %.4f over %zu tokens\n", report.token_accuracy,
                report.tokens);
  out += buf;
  return out;
}

}  // namespace graphfuse
