#pragma once

// Movie scripts and their compilation into chain maps on the plain
// Khovanov cubes. Slides, caps, cups and swaps act as the identity here;
// their content lives in the resolved functor (resolution.hpp).

#include <fstream>
#include <memory>

#include "khb/event_maps.hpp"

namespace khb {

struct MovieScript {
  PointedDiagram initial;
  std::vector<MovieEvent> events;
};

inline MovieScript parse_script_text(
    const std::string& text,
    const std::function<PointedDiagram(const std::string&)>& load_diagram) {
  MovieScript s;
  std::istringstream is(text);
  std::string line;
  bool have_diagram = false;
  while (std::getline(is, line)) {
    auto h = line.find('#');
    if (h != std::string::npos) line = line.substr(0, h);
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    if (first == "diagram") {
      std::string path;
      ls >> path;
      s.initial = load_diagram(path);
      have_diagram = true;
      continue;
    }
    std::string rest = line.substr(line.find(first));
    s.events.push_back(parse_event(rest));
  }
  if (!have_diagram) throw EventError("script: missing `diagram` line");
  return s;
}

inline MovieScript load_script(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw EventError("cannot open script " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  std::string dir = path.substr(0, path.find_last_of('/') == std::string::npos
                                       ? 0
                                       : path.find_last_of('/') + 1);
  return parse_script_text(ss.str(), [&](const std::string& p) {
    std::ifstream din(dir + p);
    if (!din) throw EventError("cannot open diagram " + dir + p);
    std::stringstream ds;
    ds << din.rdbuf();
    return parse_diagram(ds.str());
  });
}

// A compiled movie at the unresolved level: intermediate diagrams, cubes,
// per-event chain maps and their ordered composition.
struct CompiledMovie {
  std::vector<PointedDiagram> diagrams;                 // events.size()+1
  std::vector<Rewrite> rewrites;                        // events.size()
  std::vector<std::shared_ptr<CubeComplex>> cubes;      // events.size()+1
  std::vector<ChainMap> maps;                           // events.size()
  ChainMap total;                                       // first -> last

  const CubeComplex& front() const { return *cubes.front(); }
  const CubeComplex& back() const { return *cubes.back(); }
};

inline CompiledMovie compile_plain(const MovieScript& s) {
  CompiledMovie m;
  m.diagrams.push_back(s.initial);
  m.cubes.push_back(std::make_shared<CubeComplex>(build_cube(s.initial)));
  for (std::size_t i = 0; i < s.events.size(); ++i) {
    Rewrite rw = apply_event(m.diagrams.back(), s.events[i]);
    m.diagrams.push_back(rw.after);
    m.cubes.push_back(std::make_shared<CubeComplex>(build_cube(rw.after)));
    const CubeComplex& A = *m.cubes[m.cubes.size() - 2];
    const CubeComplex& B = *m.cubes.back();
    try {
      m.maps.push_back(emaps::event_chain_map(A, B, rw, s.events[i]));
    } catch (const std::exception& ex) {
      throw EventError(std::string(ex.what()) + " [event " + std::to_string(i) +
                       ": " + s.events[i].text + "]");
    }
    m.rewrites.push_back(std::move(rw));
  }
  m.total = ChainMap::id(*m.cubes.front());
  m.total.target = &m.cubes.front()->base;
  for (auto& f : m.maps) m.total = f * m.total;
  return m;
}

}  // namespace khb
