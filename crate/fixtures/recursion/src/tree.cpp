int visit(jint *nodes, jint depth) {
    if (depth > 4) {
        return nodes[depth];
    }
    return visit(nodes, depth + 1);
}

void Java_Tree_walk(JNIEnv *env, jclass cls, jintArray nodes, jint depth) {
    jint *items = env->GetIntArrayElements(nodes, 0);
    visit(items, depth);
}
