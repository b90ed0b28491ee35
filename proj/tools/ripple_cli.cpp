/*
Copyright (c) 2026 The ripple-gnn Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include <fstream>
#include <iostream>
#include <memory>

#include <CLI11.hpp>
#include <json.hpp>

#include "ripple/dist/runtime.hpp"
#include "ripple/formats.hpp"
#include "ripple/session.hpp"
#include "ripple/stream.hpp"

using namespace ripple;
using json = nlohmann::ordered_json;

namespace {

std::vector<std::size_t> parse_list(const std::string& text) {
  std::vector<std::size_t> out;
  for (auto field : split(text, ',')) {
    auto v = parse_number<std::size_t>(field);
    if (!v)
      throw config_error("bad list entry '" + std::string(field) + "' in '" + text + "'");
    out.push_back(*v);
  }
  return out;
}

/// stdout unless a path is given.
class sink {
public:
  explicit sink(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_)
        throw error("cannot write " + path);
    }
  }
  std::ostream& os() { return file_ ? *file_ : std::cout; }

private:
  std::unique_ptr<std::ofstream> file_;
};

embedding_store checked_dump(const std::string& path, const dynamic_graph& g, const model_config& cfg) {
  auto store = load_embeddings(path);
  if (store.rows() != g.num_vertices())
    throw dim_mismatch_error("dump has " + std::to_string(store.rows()) + " rows, graph has " +
                             std::to_string(g.num_vertices()) + " vertices");
  if (store.num_layers() != cfg.num_layers())
    throw dim_mismatch_error("dump depth does not match model");
  for (std::size_t l = 0; l <= cfg.num_layers(); ++l)
    detail::require_dims(store.h[l].cols(), cfg.dim(l), "dump layer width");
  return store;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

void print_summary(const std::vector<timed_batch>& batches, std::size_t n, std::size_t layers, strategy s) {
  const auto cell = summarize(s, layers, batches.empty() ? 0 : batches.front().result.size, n, batches);
  std::cerr << "strategy=" << to_string(s) << " updates=" << cell.updates << " batches=" << cell.batches
            << " throughput=" << cell.throughput << "/s median_latency_us=" << cell.median_latency_us << "\n";
}

// --- gen ---

struct gen_graph_opts {
  std::string kind = "er";
  std::size_t n = 1000, m = 7000, attach = 20, dim = 16;
  std::uint64_t seed = 1;
  std::string out_graph, out_features;
};

int cmd_gen_graph(const gen_graph_opts& o) {
  const auto kind = o.kind == "er" ? graph_kind::erdos_renyi
                    : o.kind == "ba" ? graph_kind::barabasi_albert
                                     : throw config_error("graph kind must be er or ba");
  auto g = gen_synthetic(kind, o.n, kind == graph_kind::erdos_renyi ? o.m : o.attach, o.dim, o.seed);
  write_edge_list(o.out_graph, g.graph);
  save_features(o.out_features, g.features);
  std::cerr << "vertices=" << g.graph.num_vertices() << " edges=" << g.graph.num_edges() << "\n";
  return 0;
}

struct gen_stream_opts {
  std::string graph, features, out_stream, out_snapshot;
  std::size_t additions = 100, deletions = 100, updates = 100;
  std::optional<double> withheld;
  std::uint64_t seed = 1;
};

int cmd_gen_stream(const gen_stream_opts& o) {
  const auto g = load_edge_list(o.graph);
  const auto features = load_features(o.features);
  stream_spec spec{o.seed, o.additions, o.deletions, o.updates, o.withheld};
  auto gen = generate_stream(g, features, spec);
  write_edge_list(o.out_snapshot, gen.snapshot);
  write_stream(o.out_stream, gen.records);
  std::cerr << "snapshot_edges=" << gen.snapshot.num_edges() << " records=" << gen.records.size() << "\n";
  return 0;
}

struct gen_model_opts {
  std::string dims = "16,32,8", rule = "gc", agg = "sum", out;
  double epsilon = 0.0;
  std::uint64_t seed = 1;
};

int cmd_gen_model(const gen_model_opts& o) {
  auto cfg = init_random_model(parse_list(o.dims), parse_rule(o.rule), parse_aggregator(o.agg), o.seed,
                               o.epsilon);
  save_model(o.out, cfg);
  return 0;
}

// --- bootstrap / stream / verify ---

struct bootstrap_opts {
  std::string graph, features, model, out;
};

int cmd_bootstrap(const bootstrap_opts& o) {
  const auto g = load_edge_list(o.graph);
  const auto features = load_features(o.features);
  const auto cfg = load_model(o.model);
  const auto start = std::chrono::steady_clock::now();
  const auto store = full_layerwise_inference(g, features, cfg);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  save_embeddings(o.out, store);
  std::cerr << "bootstrap vertices=" << g.num_vertices() << " layers=" << cfg.num_layers() << " seconds=" << secs
            << "\n";
  return 0;
}

struct stream_opts {
  std::string graph, dump, model, stream, strategy = "ripple", out, final_dump;
  std::size_t batch_size = 10, verify_every = 0;
  double tolerance = 1e-6;
  bool labels = false, no_timings = false;
};

int report_deviation(const std::vector<double>& h, const std::vector<double>& x, double tol, const std::string& tag) {
  double worst = 0;
  for (std::size_t l = 0; l < h.size(); ++l) {
    std::cerr << tag << " layer " << l << ": h_max_dev=" << fmt(h[l]);
    if (l > 0)
      std::cerr << " x_max_dev=" << fmt(x[l]);
    std::cerr << "\n";
    worst = std::max({worst, h[l], x[l]});
  }
  if (!(worst <= tol)) {
    std::cerr << tag << ": deviation " << fmt(worst) << " exceeds tolerance " << fmt(tol) << "\n";
    return 1;
  }
  return 0;
}

int cmd_stream(const stream_opts& o) {
  auto g = load_edge_list(o.graph);
  const auto cfg = load_model(o.model);
  auto store = checked_dump(o.dump, g, cfg);
  const auto records = read_stream(o.stream);
  const auto strat = parse_strategy(o.strategy);
  const std::size_t n = g.num_vertices();
  streaming_session session(std::move(g), std::move(store), cfg, strat);
  sink out(o.out);
  metrics_options mo{!o.no_timings, o.labels, false, to_string(strat)};
  std::vector<timed_batch> timed;
  std::uint64_t id = 0;
  for (auto batch : make_batches(records, o.batch_size)) {
    auto t = run_timed(session, batch, id++);
    auto j = batch_to_json(t.result, mo);
    if (!o.no_timings)
      j["latency_us"] = t.latency_us;
    out.os() << j.dump() << "\n";
    timed.push_back(std::move(t));
    if (o.verify_every > 0 && (id % o.verify_every == 0 || id * o.batch_size >= records.size())) {
      const auto h = session.verify();
      const auto x = verify_aggregates_against_oracle(session.graph(), session.store(), session.model());
      if (report_deviation(h, x, o.tolerance, "batch " + std::to_string(id - 1)) != 0)
        return 1;
    }
  }
  out.os().flush();
  print_summary(timed, n, cfg.num_layers(), strat);
  if (!o.final_dump.empty())
    save_embeddings(o.final_dump, session.store());
  return 0;
}

struct verify_opts {
  std::string graph, dump, model, stream, strategy = "ripple";
  std::size_t batch_size = 10;
  double tolerance = 1e-6;
};

int cmd_verify(const verify_opts& o) {
  auto g = load_edge_list(o.graph);
  const auto cfg = load_model(o.model);
  auto store = checked_dump(o.dump, g, cfg);
  if (report_deviation(verify_against_oracle(g, store, cfg), verify_aggregates_against_oracle(g, store, cfg),
                       o.tolerance, "dump") != 0)
    return 1;
  if (o.stream.empty())
    return 0;
  const auto records = read_stream(o.stream);
  streaming_session session(std::move(g), std::move(store), cfg, parse_strategy(o.strategy));
  for (auto batch : make_batches(records, o.batch_size))
    session.process(batch);
  return report_deviation(session.verify(),
                          verify_aggregates_against_oracle(session.graph(), session.store(), session.model()),
                          o.tolerance, "replay");
}

// --- bench ---

struct bench_opts {
  std::string graph, features, stream, model, rule = "gc", agg = "sum", out;
  std::string layers = "2,3", batch_sizes = "1,10,100,1000", strategies = "ripple,rc";
  std::size_t hidden = 16, classes = 8;
  double epsilon = 0.0;
  std::uint64_t seed = 1;
};

int cmd_bench(const bench_opts& o) {
  const auto g = load_edge_list(o.graph);
  const auto features = load_features(o.features);
  const auto records = read_stream(o.stream);
  std::vector<model_config> models;
  if (!o.model.empty()) {
    models.push_back(load_model(o.model));
  } else {
    for (auto L : parse_list(o.layers)) {
      if (L == 0)
        throw config_error("layer count must be positive");
      std::vector<std::size_t> dims{features.cols()};
      for (std::size_t l = 1; l < L; ++l)
        dims.push_back(o.hidden);
      dims.push_back(o.classes);
      models.push_back(init_random_model(dims, parse_rule(o.rule), parse_aggregator(o.agg), o.seed + L,
                                         o.epsilon));
    }
  }
  std::vector<strategy> strategies;
  for (auto s : split(o.strategies, ','))
    strategies.push_back(parse_strategy(std::string(s)));
  const auto sizes = parse_list(o.batch_sizes);

  json report;
  report["graph"] = {{"vertices", g.num_vertices()}, {"edges", g.num_edges()}};
  report["updates"] = records.size();
  report["cells"] = json::array();
  for (const auto& cfg : models) {
    const auto base = full_layerwise_inference(g, features, cfg);
    for (auto strat : strategies)
      for (auto B : sizes) {
        streaming_session session(g, base, cfg, strat);
        std::vector<timed_batch> timed;
        std::uint64_t id = 0;
        for (auto batch : make_batches(records, B))
          timed.push_back(run_timed(session, batch, id++));
        auto cell = summarize(strat, cfg.num_layers(), B, g.num_vertices(), timed);
        std::cerr << to_string(strat) << " L=" << cfg.num_layers() << " B=" << B << " throughput=" << cell.throughput
                  << "/s median_us=" << cell.median_latency_us << "\n";
        report["cells"].push_back(cell_to_json(cell));
      }
  }
  sink out(o.out);
  out.os() << report.dump(2) << "\n";
  return 0;
}

// --- dist ---

struct shard_opts {
  std::string dump, partition, prefix;
  std::size_t workers = 2;
};

dist::partition_map make_partition(const std::string& file, std::size_t n, std::size_t workers) {
  return file.empty() ? dist::partition_map::hash(n, workers) : dist::partition_map::load(file, n, workers);
}

int cmd_dist_shard(const shard_opts& o) {
  const auto full = load_embeddings(o.dump);
  const auto pm = make_partition(o.partition, full.rows(), o.workers);
  for (dist::worker_id w = 0; w < o.workers; ++w)
    save_shard(o.prefix + "." + std::to_string(w) + ".rgni", extract_shard(full, w, pm.owned_by(w)));
  return 0;
}

struct gather_opts {
  std::vector<std::string> shards;
  std::string out;
};

int cmd_dist_gather(const gather_opts& o) {
  std::vector<embedding_shard> shards;
  for (const auto& p : o.shards)
    shards.push_back(load_shard(p));
  save_embeddings(o.out, merge_shards(shards));
  return 0;
}

struct role_opts {
  std::string cluster, graph, model, dump, shard, partition, final_shard;
  std::size_t id = 0;
  double connect_timeout = 30;
  bool dedup_pulls = false;
  // leader only
  std::string stream, strategy = "ripple", out;
  std::size_t batch_size = 10;
  bool labels = false, no_timings = false;
};

int run_role(const role_opts& o, bool leader) {
  const auto cluster = dist::cluster_config::load(o.cluster);
  const std::size_t rank = leader ? 0 : o.id;
  if (!leader && rank == 0)
    throw config_error("worker 0 is the leader; start it with 'dist leader'");
  const auto g = load_edge_list(o.graph);
  const auto cfg = load_model(o.model);
  const auto pm = make_partition(o.partition, g.num_vertices(), cluster.size());
  dist::worker_state st;
  if (!o.shard.empty()) {
    auto shard = load_shard(o.shard);
    if (shard.worker != rank)
      throw config_error("shard belongs to worker " + std::to_string(shard.worker));
    st = dist::worker_state::from_shard(g, std::move(shard), pm, cfg);
  } else if (!o.dump.empty()) {
    st = dist::worker_state::build(g, checked_dump(o.dump, g, cfg), pm, static_cast<dist::worker_id>(rank), cfg);
  } else {
    throw config_error("need --dump or --shard");
  }
  update_stream records;
  if (leader)
    records = read_stream(o.stream);
  dist::tcp_transport net(cluster, rank,
                          std::chrono::milliseconds(static_cast<std::int64_t>(o.connect_timeout * 1000)));
  dist::worker_runtime rt(std::move(st), net, {o.dedup_pulls});
  if (leader) {
    sink out(o.out);
    const auto strat = parse_strategy(o.strategy);
    metrics_options mo{!o.no_timings, o.labels, true, to_string(strat)};
    std::vector<timed_batch> timed;
    auto last = std::chrono::steady_clock::now();
    dist::run_leader(rt, g, records, o.batch_size, strat, [&](const batch_result& r) {
      const auto now = std::chrono::steady_clock::now();
      timed.push_back({r, std::chrono::duration<double, std::micro>(now - last).count()});
      last = now;
      auto j = batch_to_json(r, mo);
      if (!o.no_timings)
        j["latency_us"] = timed.back().latency_us;
      out.os() << j.dump() << "\n";
    });
    out.os().flush();
    print_summary(timed, g.num_vertices(), cfg.num_layers(), strat);
  } else {
    dist::run_worker(rt);
  }
  if (!o.final_shard.empty())
    save_shard(o.final_shard, rt.state().shard());
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"ripple: incremental GNN inference over streaming graph updates"};
  app.require_subcommand(1);
  int rc = 0;

  auto* gen = app.add_subcommand("gen", "generate synthetic inputs");
  gen->require_subcommand(1);

  gen_graph_opts gg;
  auto* gen_graph = gen->add_subcommand("graph", "synthetic graph and features");
  gen_graph->add_option("--kind", gg.kind, "er or ba")->capture_default_str();
  gen_graph->add_option("--n", gg.n, "vertices")->capture_default_str();
  gen_graph->add_option("--m", gg.m, "edges (er)")->capture_default_str();
  gen_graph->add_option("--attach", gg.attach, "edges per new vertex (ba)")->capture_default_str();
  gen_graph->add_option("--dim", gg.dim, "feature width")->capture_default_str();
  gen_graph->add_option("--seed", gg.seed)->capture_default_str();
  gen_graph->add_option("--out-graph", gg.out_graph)->required();
  gen_graph->add_option("--out-features", gg.out_features)->required();
  gen_graph->callback([&] { rc = cmd_gen_graph(gg); });

  gen_stream_opts gs;
  auto* gen_stream = gen->add_subcommand("stream", "withhold edges into an update stream");
  gen_stream->add_option("--graph", gs.graph)->required();
  gen_stream->add_option("--features", gs.features)->required();
  gen_stream->add_option("--additions", gs.additions)->capture_default_str();
  gen_stream->add_option("--deletions", gs.deletions)->capture_default_str();
  gen_stream->add_option("--updates", gs.updates, "feature updates")->capture_default_str();
  gen_stream->add_option("--withheld-fraction", gs.withheld, "derive additions from a fraction of edges");
  gen_stream->add_option("--seed", gs.seed)->capture_default_str();
  gen_stream->add_option("--out-stream", gs.out_stream)->required();
  gen_stream->add_option("--out-snapshot", gs.out_snapshot)->required();
  gen_stream->callback([&] { rc = cmd_gen_stream(gs); });

  gen_model_opts gm;
  auto* gen_model = gen->add_subcommand("model", "random model weights");
  gen_model->add_option("--dims", gm.dims, "comma-separated d0,...,dL")->capture_default_str();
  gen_model->add_option("--rule", gm.rule, "gc, sage or gin")->capture_default_str();
  gen_model->add_option("--agg", gm.agg, "sum, mean or wsum")->capture_default_str();
  gen_model->add_option("--epsilon", gm.epsilon, "gin epsilon")->capture_default_str();
  gen_model->add_option("--seed", gm.seed)->capture_default_str();
  gen_model->add_option("--out", gm.out)->required();
  gen_model->callback([&] { rc = cmd_gen_model(gm); });

  bootstrap_opts bo;
  auto* boot = app.add_subcommand("bootstrap", "full inference, writes an embedding dump");
  boot->add_option("--graph", bo.graph)->required();
  boot->add_option("--features", bo.features)->required();
  boot->add_option("--model", bo.model)->required();
  boot->add_option("--out", bo.out)->required();
  boot->callback([&] { rc = cmd_bootstrap(bo); });

  stream_opts so;
  auto* stream = app.add_subcommand("stream", "replay an update stream, one metrics line per batch");
  stream->add_option("--graph", so.graph)->required();
  stream->add_option("--dump", so.dump)->required();
  stream->add_option("--model", so.model)->required();
  stream->add_option("--stream", so.stream)->required();
  stream->add_option("--strategy", so.strategy, "ripple or rc")->capture_default_str();
  stream->add_option("--batch-size", so.batch_size)->capture_default_str()->check(CLI::PositiveNumber);
  stream->add_option("--verify-every", so.verify_every, "check against full inference every K batches");
  stream->add_option("--tolerance", so.tolerance)->capture_default_str();
  stream->add_option("--out", so.out, "metrics file (default stdout)");
  stream->add_option("--final-dump", so.final_dump);
  stream->add_flag("--labels", so.labels, "list every label change");
  stream->add_flag("--no-timings", so.no_timings);
  stream->callback([&] { rc = cmd_stream(so); });

  verify_opts vo;
  auto* verify = app.add_subcommand("verify", "compare a dump, and optionally a replay, with full inference");
  verify->add_option("--graph", vo.graph)->required();
  verify->add_option("--dump", vo.dump)->required();
  verify->add_option("--model", vo.model)->required();
  verify->add_option("--stream", vo.stream);
  verify->add_option("--strategy", vo.strategy)->capture_default_str();
  verify->add_option("--batch-size", vo.batch_size)->capture_default_str()->check(CLI::PositiveNumber);
  verify->add_option("--tolerance", vo.tolerance)->capture_default_str();
  verify->callback([&] { rc = cmd_verify(vo); });

  bench_opts be;
  auto* bench = app.add_subcommand("bench", "sweep strategies, depths and batch sizes");
  bench->add_option("--graph", be.graph)->required();
  bench->add_option("--features", be.features)->required();
  bench->add_option("--stream", be.stream)->required();
  bench->add_option("--model", be.model, "fixed model instead of the depth sweep");
  bench->add_option("--rule", be.rule)->capture_default_str();
  bench->add_option("--agg", be.agg)->capture_default_str();
  bench->add_option("--layers", be.layers)->capture_default_str();
  bench->add_option("--hidden", be.hidden)->capture_default_str();
  bench->add_option("--classes", be.classes)->capture_default_str();
  bench->add_option("--epsilon", be.epsilon)->capture_default_str();
  bench->add_option("--batch-sizes", be.batch_sizes)->capture_default_str();
  bench->add_option("--strategies", be.strategies)->capture_default_str();
  bench->add_option("--seed", be.seed)->capture_default_str();
  bench->add_option("--out", be.out, "report file (default stdout)");
  bench->callback([&] { rc = cmd_bench(be); });

  auto* dist = app.add_subcommand("dist", "partitioned execution");
  dist->require_subcommand(1);

  shard_opts sh;
  auto* shard = dist->add_subcommand("shard", "split a dump into per-worker shards");
  shard->add_option("--dump", sh.dump)->required();
  shard->add_option("--workers", sh.workers)->required()->check(CLI::PositiveNumber);
  shard->add_option("--partition", sh.partition, "vertex,worker file (default: id mod P)");
  shard->add_option("--out-prefix", sh.prefix)->required();
  shard->callback([&] { rc = cmd_dist_shard(sh); });

  gather_opts ga;
  auto* gather = dist->add_subcommand("gather", "merge shards into one dump");
  gather->add_option("--shards", ga.shards)->required();
  gather->add_option("--out", ga.out)->required();
  gather->callback([&] { rc = cmd_dist_gather(ga); });

  role_opts wo, lo;
  auto add_common = [](CLI::App* cmd, role_opts& o) {
    cmd->add_option("--cluster", o.cluster, "worker_id,host:port lines")->required();
    cmd->add_option("--graph", o.graph)->required();
    cmd->add_option("--model", o.model)->required();
    cmd->add_option("--dump", o.dump, "full dump; this worker's rows are sliced out");
    cmd->add_option("--shard", o.shard, "this worker's shard");
    cmd->add_option("--partition", o.partition, "vertex,worker file (default: id mod P)");
    cmd->add_option("--final-shard", o.final_shard, "write owned embeddings here on shutdown");
    cmd->add_option("--connect-timeout", o.connect_timeout, "seconds")->capture_default_str();
    cmd->add_flag("--dedup-pulls", o.dedup_pulls, "rc: request each remote row once per hop");
  };
  auto* worker = dist->add_subcommand("worker", "run worker --id until SHUTDOWN");
  add_common(worker, wo);
  worker->add_option("--id", wo.id)->required();
  worker->callback([&] { rc = run_role(wo, false); });

  auto* leader = dist->add_subcommand("leader", "run worker 0 and drive the stream");
  add_common(leader, lo);
  leader->add_option("--stream", lo.stream)->required();
  leader->add_option("--strategy", lo.strategy)->capture_default_str();
  leader->add_option("--batch-size", lo.batch_size)->capture_default_str()->check(CLI::PositiveNumber);
  leader->add_option("--out", lo.out, "metrics file (default stdout)");
  leader->add_flag("--labels", lo.labels);
  leader->add_flag("--no-timings", lo.no_timings);
  leader->callback([&] { rc = run_role(lo, true); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return rc;
}
