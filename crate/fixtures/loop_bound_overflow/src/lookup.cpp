int Java_Lookup_find(JNIEnv *env, jobject self, jbyteArray key) {
    char window[16];
    int base = env->GetArrayLength(key);
    int sum = 0;
    base = 2;
    for (int i = 0; i < 15; i++) {
        sum += window[i + base];
    }
    return sum;
}
