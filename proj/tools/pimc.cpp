// SPDX-License-Identifier: Apache-2.0
// pimc: command-line front end.

#include <pimc/pimc.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

using json = nlohmann::ordered_json;
using namespace pimc;

namespace
{

class usage_error : public error
{
public:
    using error::error;
};

struct common_flags
{
    bool as_json = false;
    std::string solver;
    double timeout = 60;
    bool timeout_set = false;
    std::string config;
    bool emit_only = false;
    bool label_subset = false;
    bool keep3 = false;
    long grid = 4;
    double budget = 5e6;
    std::uint64_t seed = 1;
    unsigned jobs = 1;
};

std::string join( const std::vector< std::string >& v, const char* sep = " " )
{
    std::string out;
    for ( std::size_t k = 0; k < v.size(); ++k )
        out += ( k ? sep : "" ) + v[ k ];
    return out;
}

// alpha,beta | {alpha,beta} | {} (the empty label)
label parse_label( std::string text )
{
    if ( !text.empty() && text.front() == '{' ) {
        if ( text.back() != '}' )
            throw usage_error( "unbalanced braces in label " + text );
        text = text.substr( 1, text.size() - 2 );
    }
    label out;
    std::stringstream ss( text );
    std::string item;
    while ( std::getline( ss, item, ',' ) ) {
        auto a = item.find_first_not_of( " \t" );
        auto b = item.find_last_not_of( " \t" );
        if ( a == std::string::npos )
            continue;
        out.insert( item.substr( a, b - a + 1 ) );
    }
    return out;
}

cmp_op parse_op( const std::string& s )
{
    if ( s == "<" || s == "lt" )
        return cmp_op::lt;
    if ( s == "<=" || s == "le" )
        return cmp_op::le;
    if ( s == "=" || s == "==" || s == "eq" )
        return cmp_op::eq;
    if ( s == ">=" || s == "ge" )
        return cmp_op::ge;
    if ( s == ">" || s == "gt" )
        return cmp_op::gt;
    throw usage_error( "unknown comparison " + s );
}

rational parse_probability( const std::string& s )
{
    auto r = parse_rational( s );
    if ( !r || *r < 0 || *r > 1 )
        throw usage_error( "expected a probability in [0, 1], got " + s );
    return *r;
}

// Problem words followed by the model files.
std::pair< check_problem, std::vector< std::string > > parse_problem( const std::vector< std::string >& args )
{
    if ( args.empty() )
        throw usage_error( "missing problem (consistency, reach-exists, reach-forall, quant, quant-forall)" );
    check_problem q;
    std::size_t used = 1;
    const std::string& word = args[ 0 ];
    if ( word == "consistency" ) {
        q.kind = problem_kind::consistency;
    } else if ( word == "reach-exists" || word == "reach-forall" ) {
        q.kind = word == "reach-exists" ? problem_kind::reach_exists : problem_kind::reach_forall;
        if ( args.size() < 2 )
            throw usage_error( word + " needs a target label" );
        q.target = parse_label( args[ 1 ] );
        used = 2;
    } else if ( word == "quant" || word == "quant-exists" || word == "quant-forall" ) {
        q.kind = word == "quant-forall" ? problem_kind::quant_forall : problem_kind::quant_exists;
        if ( args.size() < 4 )
            throw usage_error( word + " needs LABEL OP P" );
        q.target = parse_label( args[ 1 ] );
        q.op = parse_op( args[ 2 ] );
        q.bound = parse_probability( args[ 3 ] );
        used = 4;
    } else {
        throw usage_error( "unknown problem " + word );
    }
    std::vector< std::string > files( args.begin() + static_cast< std::ptrdiff_t >( used ), args.end() );
    if ( files.empty() )
        throw usage_error( "missing model file" );
    return { q, files };
}

json problem_json( const check_problem& q )
{
    json j{ { "kind", to_string( q.kind ) } };
    if ( q.kind != problem_kind::consistency )
        j[ "target" ] = std::vector< std::string >( q.target.begin(), q.target.end() );
    if ( q.kind == problem_kind::quant_exists || q.kind == problem_kind::quant_forall ) {
        j[ "op" ] = to_string( q.op );
        j[ "bound" ] = to_string( q.bound );
    }
    return j;
}

json mc_json( const mc& m )
{
    json states = json::array();
    for ( state_index s = 0; s < m.state_count(); ++s )
        states.push_back( { { "name", m.name( s ) },
                            { "labels", std::vector< std::string >( m.labels_of( s ).begin(), m.labels_of( s ).end() ) } } );
    json edges = json::array();
    for ( state_index s = 0; s < m.state_count(); ++s )
        for ( const auto& [ d, p ] : m.row( s ) )
            edges.push_back( { { "from", m.name( s ) }, { "to", m.name( d ) }, { "p", to_string( p ) } } );
    return { { "initial", m.name( m.initial() ) }, { "states", states }, { "transitions", edges } };
}

json report_json( const std::string& file, const check_report& r )
{
    json j;
    j[ "file" ] = file;
    j[ "problem" ] = problem_json( r.problem );
    j[ "model" ] = { { "states", r.states }, { "transitions", r.transitions }, { "params", r.params } };
    j[ "encoding" ] = { { "kind", to_string( r.encoding ) },
                        { "variables", r.variables },
                        { "constraints", r.constraints },
                        { "assertions", r.assertions } };
    j[ "verdict" ] = r.result ? json( to_string( r.result->status ) ) : json( nullptr );
    j[ "holds" ] = r.holds ? json( *r.holds ) : json( nullptr );
    j[ "explanation" ] = r.explanation;
    if ( r.wit ) {
        json val = json::object();
        for ( const auto& [ y, x ] : r.wit->values )
            val[ y ] = to_string( x );
        j[ "witness" ] = { { "valuation", val }, { "approximate", r.wit->approximate }, { "chain", mc_json( r.wit->chain ) } };
    }
    if ( r.validation ) {
        json v = json::array();
        for ( const auto& x : r.validation->violations )
            v.push_back( { { "kind", x.kind }, { "detail", x.detail } } );
        j[ "validation" ] = { { "ok", r.validation->ok() },
                              { "approximate", r.validation->approximate },
                              { "reach", r.validation->reach ? json( to_string( *r.validation->reach ) ) : json( nullptr ) },
                              { "violations", v } };
    }
    j[ "times" ] = { { "encode", r.encode_seconds }, { "solve", r.solve_seconds }, { "validate", r.validate_seconds } };
    j[ "exit_code" ] = r.exit;
    return j;
}

void print_report( std::ostream& os, const std::string& file, const check_report& r )
{
    os << file << ": " << to_string( r.problem.kind ) << "\n";
    os << "  model: " << r.states << " states, " << r.transitions << " transitions, " << r.params << " parameters\n";
    os << "  encoding: " << to_string( r.encoding ) << ", " << r.variables << " variables, " << r.constraints
       << " constraints\n";
    if ( r.result )
        os << "  solver: " << to_string( r.result->status ) << " in " << r.solve_seconds << " s\n";
    if ( r.holds )
        os << "  property " << ( *r.holds ? "holds" : "fails" ) << "\n";
    os << "  " << r.explanation << "\n";
    if ( r.wit ) {
        os << "  witness";
        if ( r.wit->approximate )
            os << " (approximate)";
        os << ":";
        for ( const auto& [ y, x ] : r.wit->values )
            os << " " << y << " = " << to_string( x );
        os << "\n";
        const mc& m = r.wit->chain;
        for ( state_index s = 0; s < m.state_count(); ++s )
            for ( const auto& [ d, p ] : m.row( s ) )
                os << "    " << m.name( s ) << " -> " << m.name( d ) << " " << to_string( p ) << "\n";
    }
    if ( r.validation ) {
        os << "  validation: " << ( r.validation->ok() ? "ok" : "FAILED" );
        if ( r.validation->reach )
            os << ", reachability probability " << to_string( *r.validation->reach );
        os << "\n";
        for ( const auto& v : r.validation->violations )
            os << "    " << v.kind << ": " << v.detail << "\n";
    }
}

void emit( const common_flags& f, const json& j, const std::string& text )
{
    if ( f.as_json )
        std::cout << j.dump( 2 ) << "\n";
    else
        std::cout << text;
}

any_model load_model( const std::string& file )
{
    try {
        return read_model_file( file );
    } catch ( const parse_error& e ) {
        throw parse_error( file + ":" + e.what(), e.line(), e.column() );
    }
}

solver_config resolve_solver( const common_flags& f )
{
    solver_config cfg;
    cfg.timeout_seconds = f.timeout;
    if ( !f.config.empty() ) {
        json c;
        try {
            c = json::parse( read_text_file( f.config ) );
        } catch ( const json::exception& e ) {
            throw usage_error( "bad config file " + f.config + ": " + e.what() );
        }
        if ( c.contains( "solver" ) )
            cfg.command = c[ "solver" ].get< std::string >();
        if ( c.contains( "timeout" ) && !f.timeout_set )
            cfg.timeout_seconds = c[ "timeout" ].get< double >();
    }
    if ( const char* env = std::getenv( "PIMC_SOLVER_CMD" ); env && *env )
        cfg.command = env;
    if ( !f.solver.empty() )
        cfg.command = f.solver;
    return cfg;
}

encoder_options encoder_flags( const common_flags& f )
{
    encoder_options o;
    o.keep_constraint_3 = f.keep3;
    o.match = f.label_subset ? label_match::subset : label_match::exact;
    return o;
}

int cmd_check( const common_flags& f, const std::vector< std::string >& args )
{
    auto [ q, files ] = parse_problem( args );
    check_options opt;
    opt.encoder = encoder_flags( f );
    opt.emit_only = f.emit_only;
    opt.solver = resolve_solver( f );
    if ( !opt.emit_only && opt.solver.command.empty() )
        throw usage_error( "no solver configured: use --solver, PIMC_SOLVER_CMD or --config (or --emit-only)" );

    std::vector< json > results( files.size() );
    std::vector< std::string > texts( files.size() );
    std::vector< int > codes( files.size(), exit_usage );
    std::atomic< std::size_t > next{ 0 };
    auto work = [ & ] {
        for ( std::size_t k = next++; k < files.size(); k = next++ ) {
            std::ostringstream os;
            try {
                auto p = as_param_imc( load_model( files[ k ] ) );
                auto r = run_check( p, q, opt );
                results[ k ] = report_json( files[ k ], r );
                print_report( os, files[ k ], r );
                codes[ k ] = r.exit;
            } catch ( const solver_error& e ) {
                results[ k ] = { { "file", files[ k ] }, { "error", e.what() }, { "exit_code", int( exit_solver ) } };
                os << files[ k ] << ": solver error: " << e.what() << "\n";
                codes[ k ] = exit_solver;
            } catch ( const error& e ) {
                results[ k ] = { { "file", files[ k ] }, { "error", e.what() }, { "exit_code", int( exit_usage ) } };
                os << files[ k ] << ": error: " << e.what() << "\n";
                codes[ k ] = exit_usage;
            }
            texts[ k ] = os.str();
        }
    };
    std::vector< std::thread > pool;
    for ( unsigned t = 1; t < std::max( 1u, f.jobs ) && t < files.size(); ++t )
        pool.emplace_back( work );
    work();
    for ( auto& t : pool )
        t.join();

    int code = 0;
    for ( int c : codes )
        code = std::max( code, c );
    json j{ { "schema", 1 }, { "command", "check" } };
    if ( files.size() == 1 ) {
        for ( auto& [ k, v ] : results[ 0 ].items() )
            j[ k ] = v;
    } else {
        j[ "results" ] = results;
        j[ "exit_code" ] = code;
    }
    emit( f, j, join( texts, "" ) );
    return code;
}

int cmd_encode( const common_flags& f, const std::vector< std::string >& args, const std::string& goal_text,
                const std::string& out )
{
    if ( args.empty() )
        throw usage_error( "missing encoding (consistency, qual-reach, reach-aux, quant-reach)" );
    const std::string& kind = args[ 0 ];
    const bool targeted = kind == "reach-aux" || kind == "quant-reach";
    if ( kind != "consistency" && kind != "qual-reach" && !targeted )
        throw usage_error( "unknown encoding " + kind );
    if ( args.size() != ( targeted ? 3u : 2u ) )
        throw usage_error( targeted ? kind + " needs TARGET FILE" : kind + " needs FILE" );
    const std::string& file = args.back();
    auto p = as_param_imc( load_model( file ) );
    auto opt = encoder_flags( f );
    encoding e;
    if ( kind == "consistency" )
        e = encode_consistency( p, opt );
    else if ( kind == "qual-reach" )
        e = encode_qual_reach( p, opt );
    else if ( kind == "reach-aux" )
        e = encode_reach_aux( p, parse_label( args[ 1 ] ), opt );
    else
        e = encode_quant_reach( p, parse_label( args[ 1 ] ), opt );

    if ( !goal_text.empty() ) {
        // exists-reach:LABEL, none-reach:LABEL, prob:OP:P, prob-negated:OP:P
        auto colon = goal_text.find( ':' );
        std::string gk = goal_text.substr( 0, colon );
        std::string rest = colon == std::string::npos ? "" : goal_text.substr( colon + 1 );
        if ( gk == "exists-reach" )
            add_goal( e, goal::exists_reach( parse_label( rest ) ) );
        else if ( gk == "none-reach" )
            add_goal( e, goal::none_reach( parse_label( rest ) ) );
        else if ( gk == "prob" || gk == "prob-negated" ) {
            auto c2 = rest.find( ':' );
            if ( c2 == std::string::npos || !e.target )
                throw usage_error( "probability goals read prob:OP:P and need quant-reach" );
            auto op = parse_op( rest.substr( 0, c2 ) );
            auto bound = parse_probability( rest.substr( c2 + 1 ) );
            add_goal( e, gk == "prob" ? goal::prob( *e.target, op, bound ) : goal::prob_negated( *e.target, op, bound ) );
        } else
            throw usage_error( "unknown goal " + goal_text );
    }
    auto script = emit_smtlib( e.problem );
    json j{ { "schema", 1 },
            { "command", "encode" },
            { "file", file },
            { "encoding", to_string( e.kind ) },
            { "model", { { "states", p.state_count() }, { "transitions", p.transition_count() }, { "params", p.params().size() } } },
            { "variables", e.problem.vars().size() },
            { "constraints", e.problem.constraints().size() },
            { "assertions", script.assertions } };
    std::ostringstream stats;
    stats << "variables " << e.problem.vars().size() << "\nconstraints " << e.problem.constraints().size()
          << "\nassertions " << script.assertions << "\n";
    if ( !out.empty() ) {
        std::ofstream o( out, std::ios::binary );
        if ( !o )
            throw error( "cannot write " + out );
        o << script.text;
        j[ "output" ] = out;
        emit( f, j, stats.str() );
    } else if ( f.as_json ) {
        j[ "script" ] = script.text;
        emit( f, j, "" );
    } else {
        std::cout << script.text;
        std::cerr << stats.str();
    }
    return exit_holds;
}

state_set target_states( const mc& m, const std::string& spec, bool by_name, label_match mode )
{
    if ( !by_name )
        return states_with_label( m, parse_label( spec ), mode );
    state_set out;
    for ( const auto& n : parse_label( spec ) )
        out.insert( m.index_of( n ) );
    return out;
}

int cmd_eval( const common_flags& f, const std::vector< std::string >& args, const std::string& from, bool by_name )
{
    if ( args.size() < 2 )
        throw usage_error( "usage: eval reach|reach-avoid|path FILE ..." );
    const std::string& query = args[ 0 ];
    auto any = load_model( args[ 1 ] );
    const mc* m = std::get_if< mc >( &any );
    if ( !m )
        throw usage_error( args[ 1 ] + " is not an mc model" );
    const auto mode = f.label_subset ? label_match::subset : label_match::exact;
    state_index start = from.empty() ? m->initial() : m->index_of( from );
    rational value;
    if ( query == "reach" ) {
        if ( args.size() != 3 )
            throw usage_error( "usage: eval reach FILE TARGET" );
        value = reach_prob( *m, start, target_states( *m, args[ 2 ], by_name, mode ) );
    } else if ( query == "reach-avoid" ) {
        if ( args.size() != 4 )
            throw usage_error( "usage: eval reach-avoid FILE TARGET AVOID" );
        value = reach_avoid_prob( *m, start, target_states( *m, args[ 3 ], by_name, mode ),
                                  target_states( *m, args[ 2 ], by_name, mode ) );
    } else if ( query == "path" ) {
        std::vector< state_index > path;
        for ( std::size_t k = 2; k < args.size(); ++k )
            path.push_back( m->index_of( args[ k ] ) );
        if ( path.empty() )
            throw usage_error( "usage: eval path FILE STATE..." );
        value = path_prob( *m, path );
    } else {
        throw usage_error( "unknown query " + query );
    }
    json j{ { "schema", 1 }, { "command", "eval" }, { "query", query }, { "file", args[ 1 ] },
            { "value", to_string( value ) }, { "decimal", to_decimal( value, 15 ) } };
    emit( f, j, to_string( value ) + " (" + to_decimal( value, 15 ) + ")\n" );
    return exit_holds;
}

json relation_json( const mc& m, const imc& i, const sat_relation& r )
{
    json pairs = json::array();
    for ( const auto& pr : r.pairs ) {
        json delta = json::object();
        if ( auto it = r.deltas.find( pr ); it != r.deltas.end() )
            for ( const auto& [ t2, row ] : it->second )
                for ( const auto& [ s2, x ] : row )
                    delta[ m.name( t2 ) ][ i.name( s2 ) ] = to_string( x );
        pairs.push_back( { { "mc", m.name( pr.first ) }, { "imc", i.name( pr.second ) }, { "delta", delta } } );
    }
    return { { "degree", degree( r ) }, { "pairs", pairs } };
}

sat_relation read_relation( const mc& m, const imc& i, const std::string& file )
{
    json j;
    try {
        j = json::parse( read_text_file( file ) );
    } catch ( const json::exception& e ) {
        throw usage_error( "bad relation file " + file + ": " + e.what() );
    }
    sat_relation r;
    for ( const auto& p : j.at( "pairs" ) ) {
        state_pair pr{ m.index_of( p.at( "mc" ).get< std::string >() ), i.index_of( p.at( "imc" ).get< std::string >() ) };
        r.pairs.insert( pr );
        correspondence delta;
        if ( p.contains( "delta" ) )
            for ( const auto& [ t2, row ] : p[ "delta" ].items() )
                for ( const auto& [ s2, x ] : row.items() ) {
                    auto v = parse_rational( x.get< std::string >() );
                    if ( !v )
                        throw usage_error( "bad weight " + x.get< std::string >() );
                    delta[ m.index_of( t2 ) ][ i.index_of( s2 ) ] = *v;
                }
        r.deltas[ pr ] = delta;
    }
    return r;
}

int cmd_semantics( const common_flags& f, const std::vector< std::string >& args, const std::string& relation_file,
                   const std::string& mode_text )
{
    if ( args.size() < 3 )
        throw usage_error( "usage: semantics aes-check|aes-decide|split|merge MC IMC ..." );
    const std::string& op = args[ 0 ];
    auto ma = load_model( args[ 1 ] );
    auto ia = load_model( args[ 2 ] );
    const mc* m = std::get_if< mc >( &ma );
    if ( !m )
        throw usage_error( args[ 1 ] + " is not an mc model" );
    imc i;
    if ( const auto* x = std::get_if< imc >( &ia ) )
        i = *x;
    else if ( const auto* y = std::get_if< mc >( &ia ) )
        i = to_imc( *y );
    else
        throw usage_error( args[ 2 ] + " is not an imc model" );

    json j{ { "schema", 1 }, { "command", "semantics" }, { "operation", op } };
    std::ostringstream text;
    auto relation = [ & ]() -> std::optional< sat_relation > {
        if ( !relation_file.empty() )
            return read_relation( *m, i, relation_file );
        return decide_aes( *m, i );
    };

    if ( op == "aes-check" ) {
        if ( relation_file.empty() )
            throw usage_error( "aes-check needs --relation FILE" );
        auto r = read_relation( *m, i, relation_file );
        auto c = check_aes( *m, i, r );
        j[ "ok" ] = c.ok;
        j[ "degree" ] = degree( r );
        if ( !c.ok ) {
            j[ "clause" ] = c.clause;
            j[ "detail" ] = c.detail;
        }
        text << ( c.ok ? "relation satisfies every clause" : "clause " + c.clause + " fails: " + c.detail ) << "\n";
        emit( f, j, text.str() );
        return c.ok ? exit_holds : exit_fails;
    }
    if ( op == "aes-decide" ) {
        auto r = decide_aes( *m, i );
        j[ "satisfies" ] = r.has_value();
        if ( r )
            j[ "relation" ] = relation_json( *m, i, *r );
        text << ( r ? "satisfies (at every step), relation of degree " + std::to_string( degree( *r ) )
                    : std::string( "does not satisfy (at every step)" ) )
             << "\n";
        if ( r && !f.as_json )
            text << relation_json( *m, i, *r ).dump( 2 ) << "\n";
        emit( f, j, text.str() );
        return r ? exit_holds : exit_fails;
    }
    if ( op == "split" || op == "merge" ) {
        auto r = relation();
        if ( !r )
            throw usage_error( "the MC does not satisfy the IMC at every step" );
        auto split = split_degree1( *m, i, *r );
        relabeled_chain out = split;
        if ( op == "merge" ) {
            if ( args.size() != 4 )
                throw usage_error( "usage: semantics merge MC IMC TARGET [--mode min|max]" );
            extremum mode = mode_text == "max" ? extremum::max : extremum::min;
            if ( mode_text != "min" && mode_text != "max" )
                throw usage_error( "--mode is min or max" );
            out = merge_to_same_structure( split.chain, i, split.relation, parse_label( args[ 3 ] ), mode,
                                           f.label_subset ? label_match::subset : label_match::exact );
            auto before = reach_prob( *m, m->initial(), parse_label( args[ 3 ] ) );
            auto after = reach_prob( out.chain, out.chain.initial(), parse_label( args[ 3 ] ) );
            j[ "reach_before" ] = to_string( before );
            j[ "reach_after" ] = to_string( after );
            text << "reachability " << to_string( before ) << " -> " << to_string( after ) << "\n";
        }
        j[ "states" ] = out.chain.state_count();
        j[ "bisimilar" ] = bisimilar( *m, out.chain );
        j[ "chain" ] = mc_json( out.chain );
        j[ "model" ] = emit_model( out.chain );
        text << emit_model( out.chain );
        emit( f, j, text.str() );
        return exit_holds;
    }
    throw usage_error( "unknown semantics operation " + op );
}

int cmd_bench( const common_flags& f, const std::vector< std::string >& args, const std::string& preset,
               std::size_t states, std::size_t transitions, std::size_t params, std::size_t layers, std::size_t width,
               const std::string& out )
{
    bench_spec spec;
    if ( !preset.empty() ) {
        spec = preset_spec( preset, f.seed );
    } else {
        spec.states = states;
        if ( transitions )
            spec.transitions = transitions;
        spec.params = params;
        spec.seed = f.seed;
    }
    if ( !args.empty() ) {
        const std::string& shape = args[ 0 ];
        if ( shape == "chain" )
            spec.shape = bench_shape::chain;
        else if ( shape == "grid" )
            spec.shape = bench_shape::grid;
        else if ( shape == "layered" )
            spec.shape = bench_shape::layered;
        else
            throw usage_error( "unknown generator " + shape );
        if ( args.size() >= 2 ) {
            auto n = std::strtoul( args[ 1 ].c_str(), nullptr, 10 );
            if ( n == 0 )
                throw usage_error( "bad state count " + args[ 1 ] );
            spec.states = n;
        }
    }
    spec.layers = layers;
    spec.width = width;
    auto p = generate_bench( spec );
    auto text = emit_model( p );
    json j{ { "schema", 1 },
            { "command", "bench" },
            { "generator", to_string( spec.shape ) },
            { "seed", spec.seed },
            { "model", { { "states", p.state_count() }, { "transitions", p.transition_count() }, { "params", p.params().size() } } } };
    if ( !out.empty() ) {
        std::ofstream o( out, std::ios::binary );
        if ( !o )
            throw error( "cannot write " + out );
        o << text;
        j[ "output" ] = out;
        emit( f, j,
              "states " + std::to_string( p.state_count() ) + "\ntransitions " + std::to_string( p.transition_count() )
                  + "\nparams " + std::to_string( p.params().size() ) + "\n" );
    } else if ( f.as_json ) {
        j[ "text" ] = text;
        emit( f, j, "" );
    } else {
        std::cout << text;
    }
    return exit_holds;
}

int cmd_oracle( const common_flags& f, const std::vector< std::string >& args )
{
    auto [ q, files ] = parse_problem( args );
    if ( files.size() != 1 )
        throw usage_error( "oracle takes one model file" );
    auto p = as_param_imc( load_model( files[ 0 ] ) );
    grid_spec g;
    g.denominator = f.grid;
    g.budget = f.budget;
    const auto mode = f.label_subset ? label_match::subset : label_match::exact;
    json j{ { "schema", 1 }, { "command", "oracle" }, { "file", files[ 0 ] }, { "problem", problem_json( q ) },
            { "grid", f.grid }, { "grid_relative", true } };
    std::ostringstream text;
    bool holds = false;
    if ( q.kind == problem_kind::consistency ) {
        auto found = brute_consistency( p, g );
        holds = found.has_value();
        j[ "found" ] = holds;
        if ( found ) {
            json val = json::object();
            for ( const auto& [ y, x ] : found->values )
                val[ y ] = to_string( x );
            j[ "witness" ] = { { "valuation", val }, { "chain", mc_json( found->chain ) } };
        }
        text << ( holds ? "found an implementation on the grid" : "no implementation on the grid" ) << "\n";
    } else {
        const auto target = states_with_label( p, q.target, mode );
        std::optional< rational > lo, hi;
        std::size_t total = 0, meeting = 0;
        for_each_instance( p, g, [ & ]( const valuation&, const mc& m ) {
            rational x = reach_prob( m, m.initial(), target );
            lo = lo ? std::min( *lo, x ) : x;
            hi = hi ? std::max( *hi, x ) : x;
            ++total;
            bool ok = q.kind == problem_kind::reach_exists || q.kind == problem_kind::reach_forall ? x > 0
                                                                                                  : pimc::holds( q.op, x, q.bound );
            meeting += ok;
            return true;
        } );
        if ( total == 0 ) {
            j[ "instances" ] = 0;
            j[ "holds" ] = nullptr;
            text << "no implementation on the grid\n";
            emit( f, j, text.str() );
            return exit_unknown;
        }
        holds = q.universal() ? meeting == total : meeting > 0;
        j[ "min" ] = to_string( *lo );
        j[ "max" ] = to_string( *hi );
        j[ "instances" ] = total;
        j[ "meeting" ] = meeting;
        text << "reachability on the grid: min " << to_string( *lo ) << ", max " << to_string( *hi ) << " over " << total
             << " instances, " << meeting << " meeting the query\n";
    }
    j[ "holds" ] = holds;
    text << "property " << ( holds ? "holds" : "fails" ) << " on the grid (denominator " << f.grid << ")\n";
    emit( f, j, text.str() );
    return holds ? exit_holds : exit_fails;
}

} // namespace

int main( int argc, char** argv )
{
    CLI::App app{ "Verification of parametric interval Markov chains" };
    app.require_subcommand( 1 );
    common_flags f;
    std::vector< std::string > args;
    std::string goal_text, out, relation_file, mode_text = "min", from, preset;
    bool by_name = false;
    std::size_t states = 3, transitions = 0, params = 0, layers = 0, width = 0;

    auto add_common = [ & ]( CLI::App* c ) {
        c->add_flag( "--json", f.as_json, "Print the JSON report" );
        c->add_flag( "--label-subset", f.label_subset, "A state matches a target when its label contains it" );
    };
    auto add_encoder = [ & ]( CLI::App* c ) {
        c->add_flag( "--keep-constraint-3", f.keep3, "Keep constraint (3) in the reachability encodings" );
    };

    auto* check = app.add_subcommand( "check", "Decide a property with the SMT solver" );
    check->add_option( "args", args, "PROBLEM [LABEL [OP P]] FILE..." )->required();
    check->add_option( "--solver", f.solver, "Solver command, {file} is the script path" );
    check->add_option( "--timeout", f.timeout, "Solver timeout in seconds" )->each( [ & ]( const std::string& ) { f.timeout_set = true; } );
    check->add_option( "--config", f.config, "JSON config file with solver and timeout" );
    check->add_flag( "--emit-only", f.emit_only, "Build the script without running the solver" );
    check->add_option( "--jobs", f.jobs, "Parallel jobs over several files" );
    add_common( check );
    add_encoder( check );

    auto* encode = app.add_subcommand( "encode", "Write the SMT-LIB script of an encoding" );
    encode->add_option( "args", args, "ENCODING [TARGET] FILE" )->required();
    encode->add_option( "--goal", goal_text, "exists-reach:L, none-reach:L, prob:OP:P or prob-negated:OP:P" );
    encode->add_option( "-o,--out", out, "Output file" );
    add_common( encode );
    add_encoder( encode );

    auto* eval = app.add_subcommand( "eval", "Exact probabilities on an MC" );
    eval->add_option( "args", args, "reach FILE TARGET | reach-avoid FILE TARGET AVOID | path FILE STATE..." )->required();
    eval->add_option( "--from", from, "Start state (default: initial)" );
    eval->add_flag( "--states", by_name, "TARGET and AVOID are state names instead of labels" );
    add_common( eval );

    auto* sem = app.add_subcommand( "semantics", "At-every-step satisfaction and the constructions on it" );
    sem->add_option( "args", args, "aes-check|aes-decide|split|merge MC IMC [TARGET]" )->required();
    sem->add_option( "--relation", relation_file, "JSON relation file" );
    sem->add_option( "--mode", mode_text, "merge direction: min or max" );
    add_common( sem );

    auto* bench = app.add_subcommand( "bench", "Generate a synthetic pIMC" );
    bench->add_option( "args", args, "chain|grid|layered [STATES]" );
    bench->add_option( "--preset", preset, "nand-n2-shape, nand-n3-shape, nand-n5-shape or nand-n10-shape" );
    bench->add_option( "--states", states, "Number of states" );
    bench->add_option( "--transitions", transitions, "Number of transitions (default: states)" );
    bench->add_option( "--params", params, "Number of parameters" );
    bench->add_option( "--layers", layers, "Layers of the layered generator" );
    bench->add_option( "--width", width, "Row width of the grid generator" );
    bench->add_option( "--seed", f.seed, "Random seed" );
    bench->add_option( "-o,--out", out, "Output file" );
    add_common( bench );

    auto* oracle = app.add_subcommand( "oracle", "Answer a property by grid enumeration" );
    oracle->add_option( "args", args, "PROBLEM [LABEL [OP P]] FILE" )->required();
    oracle->add_option( "--grid", f.grid, "Grid denominator" );
    oracle->add_option( "--budget", f.budget, "Enumeration budget" );
    add_common( oracle );

    try {
        app.parse( argc, argv );
    } catch ( const CLI::CallForHelp& e ) {
        return app.exit( e );
    } catch ( const CLI::CallForAllHelp& e ) {
        return app.exit( e );
    } catch ( const CLI::ParseError& e ) {
        app.exit( e );
        return exit_usage;
    }

    try {
        if ( *check )
            return cmd_check( f, args );
        if ( *encode )
            return cmd_encode( f, args, goal_text, out );
        if ( *eval )
            return cmd_eval( f, args, from, by_name );
        if ( *sem )
            return cmd_semantics( f, args, relation_file, mode_text );
        if ( *bench )
            return cmd_bench( f, args, preset, states, transitions, params, layers, width, out );
        if ( *oracle )
            return cmd_oracle( f, args );
    } catch ( const solver_error& e ) {
        std::cerr << "pimc: solver error: " << e.what() << "\n";
        return exit_solver;
    } catch ( const std::exception& e ) {
        std::cerr << "pimc: " << e.what() << "\n";
        return exit_usage;
    }
    return exit_usage;
}
