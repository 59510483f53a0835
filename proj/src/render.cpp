#include "fracfem/render.hpp"

#include <sstream>
#include <stdexcept>

namespace fracfem {

std::string render_network_svg(const InterfaceNetwork& network, int k, int pixels) {
  if (k < 1 || k > network.depth()) throw std::invalid_argument("render: level outside the network depth");
  const double margin = 8.0;
  const double scale = pixels - 2.0 * margin;
  auto x_of = [&](Point p) { return margin + scale * p.x; };
  auto y_of = [&](Point p) { return margin + scale * (1.0 - p.y); };

  std::ostringstream out;
  out.precision(6);
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << pixels << "\" height=\"" << pixels
      << "\" viewBox=\"0 0 " << pixels << ' ' << pixels << "\">\n";
  out << "  <title>interface network, level " << k << "</title>\n";
  out << "  <rect x=\"" << margin << "\" y=\"" << margin << "\" width=\"" << scale << "\" height=\"" << scale
      << "\" fill=\"white\" stroke=\"#888888\" stroke-width=\"1\"/>\n";
  for (int j = 1; j <= k; ++j) {
    const char* color = j == k ? "#d62728" : "#000000";
    out << "  <g stroke=\"" << color << "\" stroke-width=\"" << (j == k ? 1.5 : 1.0)
        << "\" stroke-linecap=\"square\" fill=\"none\">\n";
    for (const auto& e : network.level(j)) {
      const Point a = network.to_point(e.a);
      const Point b = network.to_point(e.b);
      out << "    <line x1=\"" << x_of(a) << "\" y1=\"" << y_of(a) << "\" x2=\"" << x_of(b) << "\" y2=\"" << y_of(b)
          << "\"/>\n";
    }
    out << "  </g>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace fracfem
