// Copyright 2026 The kgdiscover Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "kgd/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "kgd/errors.hpp"
#include "kgd/pipeline.hpp"
#include "kgd/service.hpp"
#include "kgd/text.hpp"

namespace kgd {

namespace {

constexpr std::string_view kValidSources =
    "europe_pmc, openalex, semantic_scholar";

struct UsageError : Error {
  explicit UsageError(const std::string& m) : Error("usage", m) {}
};

std::set<SourceId> parse_sources(const std::vector<std::string>& names) {
  std::set<SourceId> out;
  for (const std::string& name : names) {
    auto s = parse_source(name);
    if (!s) {
      throw UsageError("unknown source '" + name + "'; valid sources: " +
                       std::string(kValidSources));
    }
    out.insert(*s);
  }
  if (out.empty()) out.insert(kAllSources.begin(), kAllSources.end());
  return out;
}

void write_output(const std::string& path, const std::string& data,
                  std::ostream& out) {
  if (path.empty()) {
    out << data;
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write " + path);
  f << data;
  if (!f) throw IoError("cannot write " + path);
}

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(path + " is not json: " + e.what());
  }
}

// Log rows from the command line are grouped per query.
std::string cli_session_id(std::string_view query) {
  return "cli-" + text::sha256_hex(text::trim(query)).substr(0, 16);
}

struct Common {
  std::string config;
  std::string fixtures;
  std::string log;
};

AppConfig resolve_config(const Common& c) {
  AppConfig cfg = c.config.empty() ? default_config() : load_config(c.config);
  if (!c.fixtures.empty()) cfg.fixture_dir = c.fixtures;
  if (!c.log.empty()) cfg.log_path = c.log;
  return cfg;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Federated scholarly discovery: search, theme filtering, "
               "knowledge graphs and evaluation reports",
               "kgd"};
  app.require_subcommand(1);
  app.allow_extras(false);

  Common common;
  app.add_option("--config", common.config, "JSON config file");

  // search
  auto* search = app.add_subcommand("search", "Retrieve and extract themes");
  std::string query;
  std::vector<std::string> sources;
  int limit = kDefaultPerSourceLimit;
  int themes_per_doc = 0;
  bool embed_abstract = false;
  std::string out_path;
  search->add_option("query", query, "Search query")->required();
  search->add_option("--sources", sources, "Comma-separated sources")
      ->delimiter(',');
  search->add_option("--limit", limit, "Results per source")
      ->check(CLI::Range(1, 100));
  search->add_option("--themes-per-doc", themes_per_doc, "Themes per paper")
      ->check(CLI::PositiveNumber);
  search->add_flag("--embed-abstract", embed_abstract,
                   "Embed title and abstract instead of the title alone");
  search->add_option("--out", out_path, "Output file (default stdout)");
  search->add_option("--fixtures", common.fixtures, "Replay fixture directory");
  search->add_option("--log", common.log, "Session log file");

  // filter
  auto* filter = app.add_subcommand("filter", "Apply a theme selection");
  std::string in_path;
  std::vector<std::string> selected;
  filter->add_option("--in", in_path, "Search result file")->required();
  filter->add_option("--select", selected, "Theme to keep (repeatable)");
  filter->add_option("--out", out_path, "Output file (default stdout)");
  filter->add_option("--log", common.log, "Session log file");

  // graph
  auto* graph = app.add_subcommand("graph", "Export the discovery graph");
  std::string graph_format = "json";
  std::string view = "unfiltered";
  graph->add_option("--in", in_path, "Search or filter result file")
      ->required();
  graph->add_option("--format", graph_format)
      ->check(CLI::IsMember({"json", "dot"}));
  graph->add_option("--view", view)
      ->check(CLI::IsMember({"unfiltered", "filtered"}));
  graph->add_option("--out", out_path, "Output file (default stdout)");

  // report
  auto* report = app.add_subcommand("report", "Render evaluation tables");
  std::string report_format = "md";
  report->add_option("--log", common.log, "Session log file");
  report->add_option("--format", report_format)
      ->check(CLI::IsMember({"md", "csv", "json"}));

  // capture
  auto* capture = app.add_subcommand("capture", "Record live responses");
  capture->add_option("query", query, "Search query")->required();
  capture->add_option("--sources", sources, "Comma-separated sources")
      ->delimiter(',');
  capture->add_option("--limit", limit, "Results per source")
      ->check(CLI::Range(1, 100));
  capture->add_option("--fixtures", common.fixtures, "Fixture directory")
      ->required();

  // serve
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP service");
  std::string bind;
  std::string static_dir;
  serve_cmd->add_option("--bind", bind, "host:port");
  serve_cmd->add_option("--fixtures", common.fixtures, "Replay fixture directory");
  serve_cmd->add_option("--static", static_dir, "Web UI bundle directory");
  serve_cmd->add_option("--log", common.log, "Session log file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    const CLI::App* failed = &app;
    for (auto* sub : app.get_subcommands()) failed = sub;
    err << failed->help();
    return kExitUsage;
  }

  try {
    if (search->parsed()) {
      AppConfig cfg = resolve_config(common);
      if (themes_per_doc > 0) {
        cfg.extraction.themes_per_document = static_cast<size_t>(themes_per_doc);
      }
      if (embed_abstract) cfg.extraction.embed_abstract = true;
      SearchRequest request{query, parse_sources(sources), limit};
      if (text::trim(query).empty()) throw UsageError("query is empty");
      DiscoveryPipeline pipeline = DiscoveryPipeline::from_config(cfg);
      SessionLog log(cfg.log_path);
      SearchResult result = pipeline.search(request, &log, cli_session_id(query));
      for (const PaperWarning& w : result.warnings) {
        err << "warning: " << to_string(w.source) << " paper " << w.paper_id
            << ": " << w.message << "\n";
      }
      write_output(out_path, search_result_to_json(result).dump(2) + "\n", out);
      return kExitOk;
    }

    if (filter->parsed()) {
      AppConfig cfg = resolve_config(common);
      SearchResult search_result = search_result_from_json(read_json(in_path));
      SessionLog log(cfg.log_path);
      FilterResult result;
      try {
        result = apply_filter(search_result, ThemeSelection(selected), &log,
                              cli_session_id(search_result.query));
      } catch (const UnknownThemeError& e) {
        throw UsageError(e.what());
      }
      nlohmann::json j = filter_result_to_json(result);
      j["session"] = search_result_to_json(search_result);
      write_output(out_path, j.dump(2) + "\n", out);
      auto pct = [](const std::optional<Percentage>& p) {
        return p ? format_decimal(*p) : std::string("n/a");
      };
      std::ostream& summary = out_path.empty() ? err : out;
      summary << "relevance_pct: " << pct(result.relevance) << "\n"
              << "reduction_pct: " << pct(result.reduction) << "\n";
      return kExitOk;
    }

    if (graph->parsed()) {
      nlohmann::json j = read_json(in_path);
      std::optional<FilterResult> filtered;
      SearchResult search_result;
      if (j.contains("session")) {
        search_result = search_result_from_json(j["session"]);
        ThemeSelection selection(
            j.value("selected_themes", std::vector<std::string>{}));
        FilterResult f;
        f.selection = selection;
        f.outcome = filter_corpus(search_result.corpus,
                                  search_result.paper_themes, selection);
        filtered = std::move(f);
      } else {
        search_result = search_result_from_json(j);
      }
      DiscoveryGraph g =
          graph_for(search_result, filtered, *parse_graph_view(view));
      write_output(out_path,
                   graph_format == "dot" ? export_graph_dot(g)
                                         : export_graph_json(g) + "\n",
                   out);
      return kExitOk;
    }

    if (report->parsed()) {
      std::filesystem::path log_path =
          common.log.empty() ? SessionLog::default_path()
                             : std::filesystem::path(common.log);
      LogSnapshot snap = read_log(log_path);
      if (snap.malformed_lines > 0) {
        err << "warning: skipped " << snap.malformed_lines
            << " malformed log line(s)\n";
      }
      auto tables = render_report(snap.entries);
      if (report_format == "csv") {
        out << render_csv(tables);
      } else if (report_format == "json") {
        out << report_to_json(tables).dump(2) << "\n";
      } else {
        out << render_markdown(tables);
      }
      return kExitOk;
    }

    if (capture->parsed()) {
      AppConfig cfg = resolve_config(Common{common.config, {}, {}});
      const std::filesystem::path dir = common.fixtures;
      std::optional<FixtureSet> existing;
      if (std::filesystem::exists(dir / "meta.json")) {
        existing = FixtureSet::load(dir);
      }
      auto recorder =
          std::make_shared<RecordingTransport>(std::make_shared<LiveTransport>());
      SourceGateway gateway(recorder, cfg.sources, cfg.retry);
      const std::string q = text::trim(query);
      if (q.empty()) throw UsageError("query is empty");
      for (SourceId s : parse_sources(sources)) {
        SourceResult r = gateway.search_source(s, q, limit);
        out << to_string(s) << ": " << to_string(r.timing.outcome) << ", "
            << r.records.size() << " records, " << r.timing.elapsed << " s\n";
        if (existing && existing->find(s, q) && r.timing.outcome == RetrievalOutcome::kOk) {
          err << "warning: overwriting fixture " << FixtureSet::file_stem(s, q)
              << "\n";
        }
      }
      recorder->fixtures().save(dir);
      return kExitOk;
    }

    if (serve_cmd->parsed()) {
      AppConfig cfg = resolve_config(common);
      if (!bind.empty()) cfg.bind_address = bind;
      if (!static_dir.empty()) cfg.static_dir = static_dir;
      return serve(cfg) ? kExitOk : kExitIo;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const AllSourcesFailedError& e) {
    err << "error: " << e.what() << "\n";
    return kExitRetrievalFailed;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace kgd
