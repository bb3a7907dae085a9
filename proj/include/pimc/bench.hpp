// SPDX-License-Identifier: Apache-2.0
#pragma once

// Synthetic pIMC generators for benchmarking: chains, grids and layered
// DAGs with a prescribed number of states, transitions and parameters.
//
// Every state gets one anchor transition with interval [0, 1]; the remaining
// transitions have lower bound 0. Setting every anchor to 1 is therefore
// always an implementation, so generated models are consistent.

#include "errors.hpp"
#include "expr.hpp"
#include "model.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace pimc
{

enum class bench_shape { chain, grid, layered };

inline const char* to_string( bench_shape s )
{
    switch ( s ) {
    case bench_shape::chain:
        return "chain";
    case bench_shape::grid:
        return "grid";
    case bench_shape::layered:
        return "layered";
    }
    return "?";
}

struct bench_spec
{
    bench_shape shape = bench_shape::layered;
    std::size_t states = 3;
    std::optional< std::size_t > transitions; // defaults to states
    std::size_t params = 0;
    std::size_t layers = 0; // layered only; 0 picks about sqrt(states)
    std::size_t width = 0;  // grid only; 0 picks about sqrt(states)
    std::uint64_t seed = 1;
};

struct bench_preset
{
    const char* name;
    std::size_t states;
    std::size_t transitions;
    std::size_t params;
};

// Sizes of the NAND multiplexing models (K = 1, N = 2, 3, 5, 10).
inline const std::vector< bench_preset >& bench_presets()
{
    static const std::vector< bench_preset > presets{ { "nand-n2-shape", 104, 147, 4 },
                                                      { "nand-n3-shape", 252, 364, 5 },
                                                      { "nand-n5-shape", 930, 1371, 7 },
                                                      { "nand-n10-shape", 7392, 11207, 12 } };
    return presets;
}

inline bench_spec preset_spec( const std::string& name, std::uint64_t seed = 1 )
{
    for ( const auto& p : bench_presets() )
        if ( name == p.name ) {
            bench_spec s;
            s.shape = bench_shape::layered;
            s.states = p.states;
            s.transitions = p.transitions;
            s.params = p.params;
            s.seed = seed;
            return s;
        }
    throw error( "unknown preset " + name );
}

namespace detail
{

class bench_rng
{
    std::mt19937_64 _engine;

public:
    explicit bench_rng( std::uint64_t seed ) : _engine{ seed } {}
    // raw output modulo n, identical on every standard library
    std::size_t below( std::size_t n ) { return static_cast< std::size_t >( _engine() % n ); }
};

inline std::size_t isqrt( std::size_t n )
{
    std::size_t r = 1;
    while ( ( r + 1 ) * ( r + 1 ) <= n )
        ++r;
    return r;
}

// Candidate successors of each state besides its anchor.
struct skeleton
{
    std::vector< std::size_t > anchor;
    std::vector< std::vector< std::size_t > > options;
    std::vector< label > labels;
};

inline skeleton chain_skeleton( std::size_t n )
{
    skeleton k;
    for ( std::size_t s = 0; s < n; ++s ) {
        k.anchor.push_back( s + 1 < n ? s + 1 : s );
        std::vector< std::size_t > opts;
        for ( std::size_t d = 0; d < n; ++d )
            if ( d != k.anchor.back() )
                opts.push_back( d );
        k.options.push_back( opts );
        k.labels.push_back( s + 1 == n ? label{ "goal" } : label{} );
    }
    return k;
}

inline skeleton grid_skeleton( std::size_t n, std::size_t width )
{
    skeleton k;
    auto at = [ & ]( std::size_t r, std::size_t c ) { return r * width + c; };
    for ( std::size_t s = 0; s < n; ++s ) {
        std::size_t r = s / width, c = s % width;
        std::vector< std::size_t > fwd;
        if ( c + 1 < width && at( r, c + 1 ) < n )
            fwd.push_back( at( r, c + 1 ) );
        if ( at( r + 1, c ) < n )
            fwd.push_back( at( r + 1, c ) );
        if ( fwd.empty() ) {
            k.anchor.push_back( s );
            k.options.push_back( {} );
            k.labels.push_back( { "goal" } );
            continue;
        }
        k.anchor.push_back( fwd[ 0 ] );
        std::vector< std::size_t > opts( fwd.begin() + 1, fwd.end() );
        opts.push_back( s );
        if ( c > 0 )
            opts.push_back( at( r, c - 1 ) );
        if ( r > 0 )
            opts.push_back( at( r - 1, c ) );
        k.options.push_back( opts );
        k.labels.push_back( {} );
    }
    return k;
}

inline skeleton layered_skeleton( std::size_t n, std::size_t layers, bench_rng& g )
{
    if ( layers < 2 || layers > n )
        throw error( "layered models need between 2 and |S| layers" );
    // layer 0 is the initial state alone, the rest share n - 1 states
    std::vector< std::size_t > first{ 0, 1 };
    for ( std::size_t l = 1; l < layers; ++l )
        first.push_back( first.back() + ( n - 1 ) / ( layers - 1 ) + ( l <= ( n - 1 ) % ( layers - 1 ) ? 1 : 0 ) );
    skeleton k;
    for ( std::size_t l = 0; l < layers; ++l ) {
        for ( std::size_t s = first[ l ]; s < first[ l + 1 ]; ++s ) {
            if ( l + 1 == layers ) {
                k.anchor.push_back( s );
                k.options.push_back( {} );
                k.labels.push_back( { ( s - first[ l ] ) % 2 == 0 ? "goal" : "fail" } );
                continue;
            }
            std::size_t lo = first[ l + 1 ], hi = first[ l + 2 ];
            // spread anchors so that every state of the next layer is hit
            std::size_t pos = s - first[ l ];
            std::size_t width = first[ l + 1 ] - first[ l ];
            std::size_t next = hi - lo;
            std::size_t anchor = width >= next ? lo + pos % next : lo + g.below( next );
            k.anchor.push_back( anchor );
            std::vector< std::size_t > opts;
            for ( std::size_t d = lo; d < hi; ++d )
                if ( d != anchor )
                    opts.push_back( d );
            k.options.push_back( opts );
            k.labels.push_back( {} );
        }
    }
    return k;
}

} // namespace detail

inline param_imc generate_bench( const bench_spec& spec )
{
    const std::size_t n = spec.states;
    const std::size_t t = spec.transitions.value_or( n );
    if ( n == 0 )
        throw error( "a benchmark needs at least one state" );
    if ( t < n )
        throw error( "a benchmark needs at least one transition per state" );
    if ( spec.params > t - n )
        throw error( "every parameter needs a transition besides the anchors" );

    detail::bench_rng g( spec.seed );
    detail::skeleton k;
    switch ( spec.shape ) {
    case bench_shape::chain:
        k = detail::chain_skeleton( n );
        break;
    case bench_shape::grid:
        k = detail::grid_skeleton( n, spec.width ? spec.width : detail::isqrt( n ) );
        break;
    case bench_shape::layered:
        if ( n < 2 )
            throw error( "layered models need at least 2 states" );
        k = detail::layered_skeleton( n, spec.layers ? spec.layers : std::max< std::size_t >( 2, detail::isqrt( n ) ), g );
        break;
    }
    std::size_t capacity = 0;
    for ( const auto& o : k.options )
        capacity += o.size();
    if ( t - n > capacity )
        throw error( "requested " + std::to_string( t ) + " transitions but the shape allows "
                     + std::to_string( n + capacity ) );

    std::vector< std::string > params;
    for ( std::size_t y = 0; y < spec.params; ++y )
        params.push_back( "p" + std::to_string( y ) );

    std::vector< param_imc::row_type > rows( n );
    for ( std::size_t s = 0; s < n; ++s )
        rows[ s ][ k.anchor[ s ] ] = param_interval{ param_expr::constant( rational( 0 ) ), param_expr::constant( rational( 1 ) ) };

    // extra transitions: pick a state with spare options, then one option
    std::vector< std::size_t > open;
    for ( std::size_t s = 0; s < n; ++s )
        if ( !k.options[ s ].empty() )
            open.push_back( s );
    for ( std::size_t e = 0; e < t - n; ++e ) {
        std::size_t slot = g.below( open.size() );
        std::size_t s = open[ slot ];
        auto& opts = k.options[ s ];
        std::size_t pick = g.below( opts.size() );
        std::size_t d = opts[ pick ];
        opts.erase( opts.begin() + static_cast< std::ptrdiff_t >( pick ) );
        if ( opts.empty() )
            open.erase( open.begin() + static_cast< std::ptrdiff_t >( slot ) );

        param_expr hi;
        if ( e < params.size() )
            hi = param_expr::parameter( params[ e ] );
        else if ( params.empty() || e % 2 == 0 )
            hi = param_expr::constant( rational( 1, 2 ) );
        else
            hi = param_expr::binary( arith_op::sub, param_expr::constant( rational( 1 ) ),
                                     param_expr::parameter( params[ e % params.size() ] ) );
        rows[ s ][ d ] = param_interval{ param_expr::constant( rational( 0 ) ), hi };
    }

    std::vector< std::string > names;
    for ( std::size_t s = 0; s < n; ++s )
        names.push_back( "s" + std::to_string( s ) );
    return param_imc( std::move( names ), std::move( k.labels ), 0, std::move( rows ),
                      std::set< std::string >( params.begin(), params.end() ) );
}

} // namespace pimc
