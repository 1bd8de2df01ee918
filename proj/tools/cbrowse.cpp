#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "cbrowse/article.hpp"
#include "cbrowse/context_io.hpp"
#include "cbrowse/error.hpp"
#include "cbrowse/ingestion.hpp"
#include "cbrowse/oracle.hpp"
#include "cbrowse/service.hpp"
#include "cbrowse/snapshot.hpp"

namespace {

using namespace cbrowse;

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kRuntime = 2;

// Usage problems detected after parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Timestamp fetch_time() {
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
    try {
      return Timestamp(std::chrono::seconds(std::stoll(epoch)));
    } catch (const std::exception&) {
      throw UsageError("SOURCE_DATE_EPOCH is not an integer");
    }
  }
  return std::chrono::time_point_cast<std::chrono::seconds>(std::chrono::system_clock::now());
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw StorageError("cannot write " + path);
  out << bytes;
  out.close();
  if (!out) throw StorageError("cannot write " + path);
}

struct FetchArgs {
  std::string config, out;
};

int run_fetch(const FetchArgs& args) {
  auto sources = load_source_configs(args.config);
  auto result = ingest(sources, fetch_time());
  for (const auto& r : result.reports) {
    if (r.error) {
      std::cerr << "warning: " << r.source << " failed: " << *r.error << "\n";
    } else {
      std::cout << r.source << ": " << r.articles << " articles, " << r.dropped << " dropped\n";
    }
  }
  if (!sources.empty() && result.failed_sources() == sources.size()) {
    std::cerr << "error: every source failed\n";
    return kRuntime;
  }
  write_file(args.out, dump_corpus(result.corpus));
  std::cout << "corpus: " << result.corpus.size() << " articles -> " << args.out << "\n";
  return kOk;
}

struct BuildArgs {
  std::size_t arity = kDefaultArity;
  bool include_descriptions = false;
  std::string stoplist;

  SnapshotOptions options() const {
    if (arity < 2) throw UsageError("--arity must be at least 2");
    return {arity, include_descriptions, stoplist};
  }
};

struct AnalyzeArgs {
  std::string in, out;
  BuildArgs build;
};

int run_analyze(const AnalyzeArgs& args) {
  auto options = args.build.options();
  auto corpus = load_corpus(args.in);
  auto snap = snapshot_build(corpus, options);
  write_file(args.out, snap.tree.dump());
  return kOk;
}

struct TreeArgs {
  std::string in, format = "text";
};

int run_tree(const TreeArgs& args) {
  auto tree = ConceptTree::parse(read_text_file(args.in));
  std::cout << (args.format == "json" ? tree.dump() : render_text(tree));
  return kOk;
}

struct ServeArgs {
  std::string snapshot_dir, host = "127.0.0.1", config, static_dir;
  int port = 8080;
  BuildArgs build;
};

int run_serve(const ServeArgs& args) {
  auto options = args.build.options();
  if (!std::filesystem::is_directory(args.snapshot_dir)) {
    throw StorageError("snapshot directory " + args.snapshot_dir + " does not exist");
  }
  RefreshFn refresh;
  if (!args.config.empty()) refresh = make_refresh(load_source_configs(args.config), args.snapshot_dir, options);

  // Block the stop signals before any thread starts so only sigwait sees them.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  SnapshotStore store;
  load_into(store, args.snapshot_dir);
  Api api(store, std::move(refresh));
  Server server(api, {args.host, args.port, args.static_dir});
  auto current = store.current();
  std::cout << "serving http://" << args.host << ":" << server.port() << " snapshot "
            << (current ? current->id : std::string("(none)")) << std::endl;
  int sig = 0;
  sigwait(&signals, &sig);
  server.stop();
  return kOk;
}

struct OracleArgs {
  std::string context, element, mode = "rectangles";
  bool all = false;
};

std::size_t lookup(const std::vector<std::string>& labels, const std::string& name, const char* what) {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == name) return i;
  }
  try {
    std::size_t used = 0;
    auto i = std::stoul(name, &used);
    if (used == name.size() && i < labels.size()) return i;
  } catch (const std::exception&) {
  }
  throw UsageError(std::string("unknown ") + what + " '" + name + "'");
}

int run_oracle(const OracleArgs& args) {
  auto ctx = load_context(args.context);
  auto mode = args.mode == "concepts" ? oracle::Mode::AllConcepts : oracle::Mode::AllRectangles;
  try {
    oracle::check_bounds(ctx, mode);
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }

  std::vector<oracle::Verdict> verdicts;
  if (args.all) {
    verdicts = oracle::check_all(ctx, mode);
  } else {
    auto comma = args.element.find(',');
    if (comma == std::string::npos) throw UsageError("--element expects OBJECT,ATTRIBUTE");
    Element e{lookup(ctx.objects(), args.element.substr(0, comma), "object"),
              lookup(ctx.attributes(), args.element.substr(comma + 1), "attribute")};
    if (!ctx.has(e.object, e.attribute)) throw UsageError("element " + args.element + " is not in the relation");
    verdicts.push_back(oracle::check_element(ctx, e, mode));
  }

  std::size_t agree = 0;
  for (const auto& v : verdicts) {
    agree += v.agree;
    std::cout << ctx.objects()[v.element.object] << "," << ctx.attributes()[v.element.attribute] << ": "
              << (v.agree ? "agree " : "DISAGREE ") << format_rectangle(ctx, v.actual.rectangle) << " gain "
              << v.actual.gain();
    if (!v.agree) std::cout << " expected " << format_rectangle(ctx, v.expected) << " gain " << v.best_gain;
    std::cout << "\n";
  }
  std::cout << agree << "/" << verdicts.size() << " agree\n";
  return agree == verdicts.size() ? kOk : kRuntime;
}

void add_build_flags(CLI::App* cmd, BuildArgs& b) {
  cmd->add_option("--arity", b.arity, "Children per tree node (>= 2)")->capture_default_str();
  cmd->add_flag("--include-descriptions", b.include_descriptions, "Also index description sentences");
  cmd->add_option("--stoplist", b.stoplist, "Stopword file (default: bundled list)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conceptual news browser: fetch, analyze, render and serve concept trees"};
  app.require_subcommand(1);

  FetchArgs fetch;
  auto* fetch_cmd = app.add_subcommand("fetch", "Fetch and merge all configured sources into a corpus file");
  fetch_cmd->add_option("--config", fetch.config, "Source config file")->required();
  fetch_cmd->add_option("--out", fetch.out, "Corpus file to write")->required();

  AnalyzeArgs analyze;
  auto* analyze_cmd = app.add_subcommand("analyze", "Build the concept tree of a corpus file");
  analyze_cmd->add_option("--in", analyze.in, "Corpus file")->required();
  analyze_cmd->add_option("--out", analyze.out, "Tree file to write")->required();
  add_build_flags(analyze_cmd, analyze.build);

  TreeArgs tree;
  auto* tree_cmd = app.add_subcommand("tree", "Print a tree file");
  tree_cmd->add_option("--in", tree.in, "Tree file")->required();
  tree_cmd->add_option("--format", tree.format, "text or json")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();

  ServeArgs serve;
  auto* serve_cmd = app.add_subcommand("serve", "Serve the latest snapshot over HTTP");
  serve_cmd->add_option("--snapshot-dir", serve.snapshot_dir, "Snapshot directory")->required();
  serve_cmd->add_option("--port", serve.port, "Port (0 picks a free one)")->capture_default_str();
  serve_cmd->add_option("--host", serve.host, "Bind address")->capture_default_str();
  serve_cmd->add_option("--config", serve.config, "Source config enabling POST /v1/refresh");
  serve_cmd->add_option("--static", serve.static_dir, "Directory of UI assets served at /");
  add_build_flags(serve_cmd, serve.build);

  OracleArgs orc;
  auto* oracle_cmd = app.add_subcommand("oracle", "Check optimal_rectangle against brute force");
  oracle_cmd->add_option("--context", orc.context, "Context file")->required();
  auto* element_opt = oracle_cmd->add_option("--element", orc.element, "OBJECT,ATTRIBUTE (labels or indices)");
  auto* all_opt = oracle_cmd->add_flag("--all", orc.all, "Check every pair of the relation");
  element_opt->excludes(all_opt);
  oracle_cmd->add_option("--mode", orc.mode, "rectangles (<= 5x5) or concepts (<= 8x8)")
      ->check(CLI::IsMember({"rectangles", "concepts"}))
      ->capture_default_str();

  try {
    app.parse(argc, argv);
    if (*oracle_cmd && !*element_opt && !orc.all) throw UsageError("oracle needs --element or --all");
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (*fetch_cmd) return run_fetch(fetch);
    if (*analyze_cmd) return run_analyze(analyze);
    if (*tree_cmd) return run_tree(tree);
    if (*serve_cmd) return run_serve(serve);
    return run_oracle(orc);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
}
